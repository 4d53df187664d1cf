use std::fmt::Write;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::render::render_segment;
use super::request::{AnalysisRequest, Command, RenderFormat};
use crate::algebra::{Factor, Field, IntPolynomial, RootClass, Scalar, Spectral};
use crate::conjugacy::{
    analyze_conjugacy, choose_degree, recognition_length_estimate, repetition_families, repetition_vectors,
    ConjugacyConfig, ConjugacyVerdict, DegreeChoice, ObstructionOptions, RecognitionEstimate, RepetitionFamily,
    RepetitionVector,
};
use crate::error::ResultExt;
use crate::spectrum::{classify_spectrum, letter_frequencies, Candidate, LengthVector, SpectrumOptions, SpectrumReport};
use crate::subst::{
    aperiodicity_check, is_full, recurrence_vectors, Aperiodicity, FixedPoint, FixedPointInfo, Primitivity,
    RecurrenceVector, Substitution,
};
use crate::Result;

pub const VERSION: &str = concat!("subtile ", env!("CARGO_PKG_VERSION"));

const APERIODICITY_DEPTH: usize = 20_000;

/// The standing hypotheses every analysis relies on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisChecklist {
    pub primitivity: Primitivity,
    pub aperiodicity: Aperiodicity,
    /// A recurrence vector `v` with `v, Mv, ..., M^(n-1) v` independent.
    pub full_recurrence_vector: Option<RecurrenceVector>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubstitutionSummary {
    pub substitution: Substitution,
    pub matrix: Vec<Vec<i64>>,
    pub char_poly: IntPolynomial,
    pub factors: Vec<Factor>,
    pub root_classes: Vec<RootClass>,
    pub perron_eigenvalue: Scalar,
    pub perron_eigenvalue_approx: f64,
    /// Left Perron eigenvector, first entry 1.
    pub natural_lengths: Vec<Scalar>,
    pub letter_frequencies: Vec<Scalar>,
    pub constant_length: Option<usize>,
    pub fixed_point: FixedPointInfo,
    pub fixed_point_prefix: String,
    /// Letter permutations commuting with the substitution.
    pub symmetries: Vec<String>,
    pub recurrence_vectors: Vec<RecurrenceVector>,
    pub recognition: Option<RecognitionEstimate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyPayload {
    pub lengths: LengthVector,
    pub lengths2: LengthVector,
    pub verdict: ConjugacyVerdict,
    /// The decisive verdict was re-derived from scratch.
    pub rechecked: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepetitionListing {
    pub metric: LengthVector,
    pub degree: Scalar,
    pub degree_choice: Option<DegreeChoice>,
    pub max_word_len: usize,
    pub vectors: Vec<RepetitionVector>,
    pub families: Vec<RepetitionFamily>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderedSegment {
    pub format: RenderFormat,
    pub window: (Scalar, Scalar),
    pub supertiles: u32,
    pub document: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Analyze(Box<SubstitutionSummary>),
    Spectrum(Box<SpectrumReport>),
    Conjugacy(Box<ConjugacyPayload>),
    Repvecs(Box<RepetitionListing>),
    Render(Box<RenderedSegment>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub request: AnalysisRequest,
    pub hypotheses: HypothesisChecklist,
    pub results_applied: Vec<String>,
    pub decisive: bool,
    pub payload: Payload,
}

impl Report {
    /// 0 for a decisive verdict, 2 for undecided.
    pub fn exit_code(&self) -> i32 {
        if self.decisive {
            0
        } else {
            2
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| crate::Error::Invalid(format!("report JSON: {e}")))
    }

    /// A short human-readable account.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let sigma = &self.request.substitution;
        let _ = writeln!(out, "{} on {sigma}", self.request.command.name());
        let h = &self.hypotheses;
        let prim = match h.primitivity {
            Primitivity::Primitive { power } => format!("primitive (M^{power} > 0)"),
            _ => "not primitive".into(),
        };
        let aper = match &h.aperiodicity {
            Aperiodicity::AperiodicEvidence { .. } => "aperiodic (complexity evidence)".to_string(),
            Aperiodicity::Periodic { period } => format!("periodic with period {period}"),
            Aperiodicity::Inconclusive { reason } => format!("aperiodicity inconclusive: {reason}"),
        };
        let full = match &h.full_recurrence_vector {
            Some(r) => format!("full recurrence vector {} ({})", r.vector, r.witness),
            None => "no full recurrence vector found".into(),
        };
        let _ = writeln!(out, "  {prim}; {aper}; {full}");
        match &self.payload {
            Payload::Analyze(s) => {
                let _ = writeln!(out, "  matrix {:?}", s.matrix);
                let _ = writeln!(out, "  characteristic polynomial {}", s.char_poly);
                let _ = writeln!(
                    out,
                    "  Perron eigenvalue {} ~ {:.6}",
                    describe(&s.perron_eigenvalue),
                    s.perron_eigenvalue_approx
                );
                let nat: Vec<String> = s.natural_lengths.iter().map(describe).collect();
                let _ = writeln!(out, "  natural lengths ({})", nat.join(", "));
                if let Some(r) = &s.recognition {
                    let _ = writeln!(out, "  recognition radius {} (scan of {} letters)", r.radius, r.scan_len);
                }
            }
            Payload::Spectrum(r) => {
                let _ = writeln!(out, "  case: {}", r.case.tag());
                if let Some(c) = &r.constant_length {
                    let _ = writeln!(out, "  n = {}, n_a = {}, n_b = {}, z = {}, N = {}", c.n, c.n_a, c.n_b, c.z, c.big_n);
                    let _ = writeln!(out, "  {}", c.group);
                }
                for c in &r.candidates {
                    let _ = writeln!(out, "  k/2pi = {}: {:?}", c.k_over_2pi, c.verdict);
                }
                for n in &r.notes {
                    let _ = writeln!(out, "  note: {n}");
                }
            }
            Payload::Conjugacy(c) => {
                let _ = writeln!(out, "  L = {}, L' = {}", c.lengths, c.lengths2);
                match &c.verdict {
                    ConjugacyVerdict::Certificate(cert) => {
                        let _ = writeln!(
                            out,
                            "  certificate: k = {}, relabelling {}, remainder {}{}",
                            cert.k,
                            cert.relabelling,
                            cert.remainder,
                            cert.root_power.map(|r| format!(" (powers of the root, root^{r} = substitution)")).unwrap_or_default()
                        );
                    }
                    ConjugacyVerdict::Obstructed { generator, report } => {
                        let _ = writeln!(
                            out,
                            "  obstructed: repetition family generated by {generator} at degree {} has no match",
                            report.degree
                        );
                    }
                    ConjugacyVerdict::Undecided { reason, notes, .. } => {
                        let _ = writeln!(out, "  undecided: {reason}");
                        for n in notes {
                            let _ = writeln!(out, "    {n}");
                        }
                    }
                }
            }
            Payload::Repvecs(r) => {
                let _ = writeln!(out, "  degree {} in metric {}: {} vectors", r.degree, r.metric, r.vectors.len());
                for f in &r.families {
                    let _ = writeln!(
                        out,
                        "  family {} ({} members, limit degree {} ~ {:.4})",
                        f.generator,
                        f.members.len(),
                        f.limit_degree,
                        f.limit_degree.approx()
                    );
                }
            }
            Payload::Render(r) => out.push_str(&r.document),
        }
        out
    }
}

fn describe(x: &Scalar) -> String {
    if x.is_rational() {
        x.to_string()
    } else {
        format!("{x} (x = Perron eigenvalue)")
    }
}

fn checklist(sigma: &Substitution) -> Result<HypothesisChecklist> {
    let primitivity = sigma.is_primitive(None);
    let aperiodicity = aperiodicity_check(sigma, APERIODICITY_DEPTH)?;
    let m = sigma.matrix();
    let full_recurrence_vector = if matches!(primitivity, Primitivity::Primitive { .. }) {
        recurrence_vectors(sigma, 20_000, 30)?.into_iter().find(|r| is_full(&r.vector, &m))
    } else {
        None
    };
    Ok(HypothesisChecklist { primitivity, aperiodicity, full_recurrence_vector })
}

fn summary_of(req: &AnalysisRequest) -> Result<SubstitutionSummary> {
    let sigma = &req.substitution;
    let m = sigma.matrix();
    let spec = Spectral::new(&m)?;
    let fp = FixedPoint::new(sigma)?;
    let symmetries = sigma
        .commuting_permutations()
        .iter()
        .map(|p| {
            let from: String = sigma.alphabet().iter().collect();
            let to: String = p.iter().map(|&i| sigma.letter(i)).collect();
            format!("{from}->{to}")
        })
        .collect();
    Ok(SubstitutionSummary {
        substitution: sigma.clone(),
        matrix: m.to_rows().iter().map(|r| r.iter().map(|x| x.to_i64().unwrap_or(i64::MAX)).collect()).collect(),
        char_poly: spec.char_poly.clone(),
        factors: spec.factors.clone(),
        root_classes: spec.classes().cloned().collect(),
        perron_eigenvalue: spec.lambda().clone(),
        perron_eigenvalue_approx: spec.lambda().approx(),
        natural_lengths: spec.perron.left.clone(),
        letter_frequencies: letter_frequencies(sigma)?,
        constant_length: sigma.constant_length(),
        fixed_point: fp.info(),
        fixed_point_prefix: sigma.show(&fp.prefix(60)),
        symmetries,
        recurrence_vectors: recurrence_vectors(sigma, req.budget.prefix_len.unwrap_or(10_000).min(100_000), 12)?
            .into_iter()
            .take(12)
            .collect(),
        recognition: recognition_length_estimate(sigma, 20_000).ok(),
    })
}

fn spectrum_options(req: &AnalysisRequest) -> Result<SpectrumOptions> {
    let mut o = SpectrumOptions::default();
    let b = &req.budget;
    if let Some(p) = b.prefix_len {
        o.prefix_len = p;
    }
    if let Some(w) = b.max_word_len {
        o.max_word_len = w;
    }
    if let Some(m) = b.m_max {
        o.verify.m_max = m;
        o.verify.tail = o.verify.tail.min(m);
    }
    if let Some(c) = &b.candidates {
        o.candidates = Some(c.iter().map(|e| Ok(Candidate::Exact(req.eval(e)?))).collect::<Result<Vec<_>>>()?);
    }
    Ok(o)
}

fn conjugacy_config(req: &AnalysisRequest) -> Result<ConjugacyConfig> {
    let b = &req.budget;
    let d = ObstructionOptions::default();
    Ok(ConjugacyConfig {
        degree: b.degree.as_deref().map(|p| req.eval(p)).transpose()?,
        obstruction: ObstructionOptions {
            max_word_len: b.max_word_len.unwrap_or(d.max_word_len),
            delta: b.delta.unwrap_or(d.delta),
            m_max: b.m_max.unwrap_or(d.m_max),
        },
        root: req.root.clone(),
        ..Default::default()
    })
}

/// Runs one request. Deterministic: all sampling reads the fixed point.
pub fn run(req: &AnalysisRequest) -> Result<Report> {
    req.budget.check()?;
    let sigma = &req.substitution;
    let hypotheses = checklist(sigma).op("hypotheses")?;
    let needs_aperiodic = matches!(req.command, Command::Spectrum | Command::Conjugacy | Command::Repvecs);
    if needs_aperiodic
        && !matches!(hypotheses.aperiodicity, Aperiodicity::AperiodicEvidence { .. })
        && req.budget.assume_aperiodic != Some(true)
    {
        return Err(crate::Error::Precondition(
            "no aperiodicity evidence for the substitution; set assume_aperiodic = true to proceed".into(),
        ))
        .op("hypotheses");
    }
    let (payload, decisive, results_applied) = match req.command {
        Command::Analyze => {
            let s = summary_of(req).op("analyze")?;
            let applied = vec![
                "substitution matrix, characteristic polynomial and certified root classification".into(),
                "Perron eigenvalue with left and right eigenvectors".into(),
            ];
            (Payload::Analyze(Box::new(s)), true, applied)
        }
        Command::Spectrum => {
            let l = req.lengths().op("spectrum")?;
            let r = classify_spectrum(sigma, &l, &spectrum_options(req)?).op("spectrum")?;
            let decisive = r.is_decisive();
            let applied = r.results_applied.clone();
            (Payload::Spectrum(Box::new(r)), decisive, applied)
        }
        Command::Conjugacy => {
            let l = req.lengths().op("conjugacy")?;
            let l2 = req.lengths2().op("conjugacy")?;
            let verdict = analyze_conjugacy(sigma, &l, &l2, &conjugacy_config(req)?).op("conjugacy")?;
            let rechecked = if verdict.is_decisive() {
                Some(verdict.recheck(sigma, &l, &l2, req.root.as_ref()).op("conjugacy")?)
            } else {
                None
            };
            let applied = vec![
                "sufficient condition: (L M^k - L') M^m -> 0, up to a letter permutation commuting with the substitution, gives a conjugacy".into(),
                "necessary condition: the asymptotic lengths of repetition-vector families must be matched".into(),
            ];
            let decisive = verdict.is_decisive() && rechecked == Some(true);
            (Payload::Conjugacy(Box::new(ConjugacyPayload { lengths: l, lengths2: l2, verdict, rechecked })), decisive, applied)
        }
        Command::Repvecs => {
            let metric = req.lengths().op("repvecs")?;
            let max_word_len = req.budget.max_word_len.unwrap_or(300);
            let (degree, choice) = match &req.budget.degree {
                Some(p) => (req.eval(p)?, None),
                None => {
                    let c = choose_degree(sigma, max_word_len).op("repvecs")?;
                    (c.p.clone(), Some(c))
                }
            };
            let vectors = repetition_vectors(sigma, &metric, &degree, max_word_len).op("repvecs")?;
            let families = repetition_families(&vectors, &sigma.matrix()).op("repvecs")?;
            let applied = vec!["repetition vectors grouped into families v, Mv, M^2 v, ...".into()];
            let listing = RepetitionListing { metric, degree, degree_choice: choice, max_word_len, vectors, families };
            (Payload::Repvecs(Box::new(listing)), true, applied)
        }
        Command::Render => {
            let l = req.lengths().op("render")?;
            let (a, b) = req.budget.window.clone().unwrap_or(("0".into(), "20".into()));
            let window = (req.eval(&a)?, req.eval(&b)?);
            let format = req.budget.format.unwrap_or(RenderFormat::Svg);
            let supertiles = req.budget.supertiles.unwrap_or(1);
            let document = render_segment(sigma, &l, &window.0, &window.1, format, supertiles).op("render")?;
            let seg = RenderedSegment { format, window, supertiles, document };
            (Payload::Render(Box::new(seg)), true, Vec::new())
        }
    };
    Ok(Report { version: VERSION.into(), request: req.clone(), hypotheses, results_applied, decisive, payload })
}
