//! Request files, the analysis driver, JSON reports and segment rendering.

mod render;
mod report;
mod request;
pub mod serde_exact;

pub use render::{render_segment, SEGMENT_CAP};
pub use report::{
    run, ConjugacyPayload, HypothesisChecklist, Payload, RenderedSegment, Report, RepetitionListing,
    SubstitutionSummary, VERSION,
};
pub use request::{
    eval_poly, parse_poly, AnalysisRequest, Budget, Command, FieldDecl, RenderFormat, BUDGET_ENV, PREFIX_CAP,
    RENDER_TILE_CAP, WORD_LEN_CAP,
};
