//! End-to-end scenario pipeline: degree estimation, ergodicity verdict,
//! per-representation spectral verdicts with probe correlations, and the
//! emitted files.

use std::path::{Path, PathBuf};
use std::time::Instant;

use liedeg_core::degree::{
    degree_constant_diagonal, degree_constant_ergodic, ergodicity_verdict, invariance_check_homomorphism, rep_degree_data, rho_phi, su2_straighten,
    DegreeField, DegreeReport, HomSource, Homomorphism, RHO_THRESHOLD,
};
use liedeg_core::dynamics::{manufactured_su2, BasePoint, Cocycle, QuadratureSpec, TranslationFlow, TrigPoly};
use liedeg_core::group::{p_ad, AlgebraElement, BranchTracker};
use liedeg_core::koopman::{ac_verdict, correlation_series, dini_modulus, log_grid, mixing_verdict, rep_lie_derivative, DegreeData, FiberVector, SpectralVerdict};
use liedeg_core::rep::Representation;
use liedeg_core::{Branch, GroupTag};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{CocycleSpec, DegreeRoute, ScenarioConfig, ScenarioName};
use crate::error::{LabError, LabResult};
use crate::series;

/// Probes per representation block (unit coefficient vectors `e_k`).
pub const MAX_PROBES: usize = 5;
/// Path resolution for the branch-continuity walk.
const LOOP_STEPS: usize = 256;
pub const REPORT_FILE: &str = "report.json";
pub const TIMINGS_FILE: &str = "timings.json";

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraOut {
    pub coords: Vec<f64>,
    pub norm: f64,
    /// Matrix realization, entries as `[re, im]`.
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl From<&AlgebraElement<f64>> for AlgebraOut {
    fn from(z: &AlgebraElement<f64>) -> Self {
        let m = z.to_matrix();
        let matrix = (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect();
        AlgebraOut { coords: z.coords(), norm: z.norm(), matrix }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldOut {
    pub points: usize,
    pub n_used: usize,
    pub mean: Option<AlgebraOut>,
    pub spread: f64,
    pub max_diagnostic: f64,
    pub constant: bool,
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RepOut {
    pub label: String,
    pub eigenvalues: Vec<f64>,
    pub a_phi_pi: f64,
    pub kernel_indices: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErgodicityOut {
    pub headline: String,
    pub obstructions: Vec<String>,
    pub justification: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RhoOut {
    pub rho: f64,
    pub max_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeSection {
    pub group: String,
    pub route: DegreeRoute,
    pub provenance: String,
    pub m_star: Option<AlgebraOut>,
    pub integral_m: AlgebraOut,
    pub p_ad_integral: AlgebraOut,
    pub field: FieldOut,
    pub rho: Option<RhoOut>,
    pub per_rep: Vec<RepOut>,
    pub ergodicity: ErgodicityOut,
}

#[derive(Clone, Debug, Serialize)]
pub struct StraighteningOut {
    pub rho: f64,
    pub grid_points: usize,
    pub max_off_diagonal: f64,
    pub min_conditioning: f64,
    pub winding: Option<f64>,
    pub max_diagnostic: f64,
    pub partner_degree: AlgebraOut,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomomorphismOut {
    pub homomorphism: String,
    pub max_deviation: f64,
    pub m_field_deviation: f64,
    pub n_used: usize,
    /// Scalar part `s` of `P_Ad` of the composite degree, `is·I`.
    pub composite_s: f64,
    /// Sign flips of the tracked composite once around the `coord` loop
    /// through the first sample point.
    pub loop_flips: usize,
    /// `+` when the tracked value closes up around the loop, `-` when it
    /// returns negated.
    pub loop_monodromy: String,
    /// Whether a continuous branch of the composite exists along the loop.
    pub continuous_branch: bool,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisOut {
    pub name: String,
    pub status: String,
    pub value: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeOut {
    pub index: usize,
    pub status: String,
    pub c0: f64,
    pub tail_max: f64,
    pub wiener_final: f64,
    pub flagged: usize,
    pub csv: Option<String>,
    pub svg: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictOut {
    pub verdict: String,
    pub hypotheses: Vec<HypothesisOut>,
    pub probes: Vec<ProbeOut>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralSection {
    pub rep: String,
    pub j: usize,
    pub eigenvalues: Vec<f64>,
    pub kernel_indices: Vec<usize>,
    pub mixing: VerdictOut,
    pub ac: VerdictOut,
}

#[derive(Clone, Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct BaseOut {
    pub dim: usize,
    pub alpha: Vec<f64>,
    pub uniquely_ergodic: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub tool: ToolInfo,
    pub config: ScenarioConfig,
    pub cocycle_note: String,
    pub base: BaseOut,
    pub degree: DegreeSection,
    pub straightening: Option<StraighteningOut>,
    pub homomorphism: Option<HomomorphismOut>,
    pub spectral: Vec<SpectralSection>,
    pub caveats: Vec<String>,
    /// Series files, relative to the output directory.
    pub files: Vec<String>,
    /// Wall-clock timings live in a separate file so that the report itself
    /// is byte-reproducible.
    pub timings_file: &'static str,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: RunReport,
    pub report_path: PathBuf,
    pub timings: Vec<(String, f64)>,
}

/// `(1, α_1, …, α_d)` rationally independent up to integer vectors of
/// sup-norm 10, tested at tolerance 1e−9.
pub fn looks_uniquely_ergodic(alpha: &[f64]) -> bool {
    const R: i64 = 10;
    let d = alpha.len();
    let total = (2 * R + 1).pow(d as u32);
    (0..total).all(|mut idx| {
        let mut dot = 0.0;
        let mut zero = true;
        for a in alpha {
            let n = idx % (2 * R + 1) - R;
            idx /= 2 * R + 1;
            zero &= n == 0;
            dot += n as f64 * a;
        }
        zero || (dot - dot.round()).abs() > 1e-9
    })
}

fn sample_points(d: usize, count: usize, seed: u64) -> Vec<BasePoint<f64>> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| BasePoint::new((0..d).map(|_| r.random::<f64>()).collect())).collect()
}

fn integral_quadrature(d: usize) -> QuadratureSpec {
    QuadratureSpec::new(if d == 1 { 256 } else { 64 })
}

fn guard_finite(what: &str, vals: impl IntoIterator<Item = f64>) -> LabResult<()> {
    if vals.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(LabError::Numeric(format!("{what} is not finite")))
    }
}

/// Everything the spectral stage needs from the degree stage.
pub struct DegreeStage {
    pub section: DegreeSection,
    pub straightening: Option<StraighteningOut>,
    pub homomorphism: Option<HomomorphismOut>,
    /// Degree handed to the verdicts (constant when a closed form applies).
    pub degree: DegreeData<f64>,
    /// Cocycle whose correlations are computed.
    pub corr_cocycle: Cocycle<f64>,
    pub caveats: Vec<String>,
}

pub fn degree_stage(cfg: &ScenarioConfig, flow: &TranslationFlow<f64>, phi: &Cocycle<f64>, reps: &[Representation<f64>]) -> LabResult<DegreeStage> {
    let d = flow.dim();
    let points = sample_points(d, cfg.degree_points, cfg.seed);
    let field = DegreeField::estimate(phi, flow, &points, cfg.n_degree);
    guard_finite("degree field", field.values.iter().flat_map(|v| v.coords()))?;
    let integral = degree_constant_diagonal(phi, &integral_quadrature(d), d);
    guard_finite("integral of M_phi", integral.coords())?;
    let route = cfg.cocycle.route();
    let mut caveats = Vec::new();
    let constancy = field.constancy();
    let (m_star, provenance) = match route {
        DegreeRoute::Diagonal => (
            Some(integral.clone()),
            "integral of M_phi over the base: pi o phi is diagonal and the base translation is uniquely ergodic".to_string(),
        ),
        DegreeRoute::Ergodic => {
            caveats.push(
                "unique ergodicity of the skew product is an input assumption; the built-in stands in for a uniquely ergodic SO(3) cocycle known only to exist"
                    .into(),
            );
            (
                Some(degree_constant_ergodic(phi, &integral_quadrature(d), d)),
                "P_Ad of the integral of M_phi: skew product assumed uniquely ergodic".to_string(),
            )
        }
        DegreeRoute::Field => match &constancy {
            Some(k) if k.constant => (Some(k.mean.clone()), "Cesaro field is constant on the sample".to_string()),
            _ => (None, "no closed form; the Cesaro degree field varies across the sample".to_string()),
        },
    };

    let tag = phi.tag;
    let mut rho_out = None;
    let mut straightening = None;
    let mut partner: Option<(AlgebraElement<f64>, Cocycle<f64>)> = None;
    if tag == GroupTag::Su2 {
        let rho = rho_phi(&field)?;
        rho_out = Some(RhoOut { rho: rho.rho, max_deviation: rho.max_deviation });
        if let CocycleSpec::Su2Manufactured { k } = cfg.cocycle {
            let grid = QuadratureSpec::new(32).points::<f64>(d);
            let st = su2_straighten(phi, flow, cfg.n_degree, &grid, RHO_THRESHOLD)?;
            let pd = AlgebraElement::su2_diag(st.rho);
            straightening = Some(StraighteningOut {
                rho: st.rho,
                grid_points: grid.len(),
                max_off_diagonal: st.max_off_diagonal,
                min_conditioning: st.min_conditioning,
                winding: st.winding,
                max_diagnostic: st.max_diagnostic,
                partner_degree: (&pd).into(),
            });
            caveats.push("per-representation data and spectral verdicts use the straightened diagonal partner; the cohomology transports them to phi".into());
            partner = Some((pd, manufactured_su2(flow, k)?.delta));
        }
    }

    let degree_nonzero = match (&partner, &m_star) {
        (Some((pd, _)), _) => pd.norm() > RHO_THRESHOLD,
        (None, Some(m)) => m.norm() > RHO_THRESHOLD,
        (None, None) => field.values.iter().map(|v| v.norm()).sum::<f64>() / field.values.len().max(1) as f64 > RHO_THRESHOLD,
    };
    let uniquely_ergodic = looks_uniquely_ergodic(&flow.alpha);
    let verdict = ergodicity_verdict(tag, &integral, degree_nonzero, uniquely_ergodic)?;

    let rep_degree = partner.as_ref().map(|p| &p.0).or(m_star.as_ref());
    let per_rep = reps.iter().map(|r| rep_degree_data(r, rep_degree, Some(&field))).collect::<Result<Vec<_>, _>>()?;
    let core_report = DegreeReport {
        group: tag,
        m_star: m_star.clone(),
        per_rep,
        verdict,
        provenance,
        n_used: cfg.n_degree,
        diagnostics: vec![("max_cesaro_diagnostic".into(), field.max_diagnostic())],
    };

    let homomorphism = match cfg.cocycle {
        CocycleSpec::U2Product { coord, k, angle } => Some(u2_homomorphism_pipeline(flow, coord, k, angle, &points, cfg.n_degree)?),
        _ => None,
    };
    if let Some(h) = homomorphism.as_ref().filter(|h| !h.continuous_branch) {
        caveats.push(format!("the SO3 x T composite has no continuous branch: it returns with sign {} around the loop", h.loop_monodromy));
    }

    let section = DegreeSection {
        group: core_report.group.to_string(),
        route,
        provenance: core_report.provenance.clone(),
        m_star: core_report.m_star.as_ref().map(Into::into),
        integral_m: (&integral).into(),
        p_ad_integral: (&p_ad(&integral)).into(),
        field: FieldOut {
            points: field.points.len(),
            n_used: field.n_used,
            mean: field.mean().as_ref().map(Into::into),
            spread: field.spread(),
            max_diagnostic: field.max_diagnostic(),
            constant: constancy.as_ref().is_some_and(|k| k.constant),
            tolerance: constancy.as_ref().map(|k| k.tolerance),
        },
        rho: rho_out,
        per_rep: core_report
            .per_rep
            .iter()
            .map(|r| RepOut { label: r.label.clone(), eigenvalues: r.eigenvalues.clone(), a_phi_pi: r.a_phi_pi, kernel_indices: r.kernel_indices.clone() })
            .collect(),
        ergodicity: ErgodicityOut {
            headline: core_report.verdict.headline(),
            obstructions: core_report.verdict.labels(),
            justification: core_report.verdict.justification.clone(),
        },
    };
    let (degree, corr_cocycle) = match partner {
        Some((pd, delta)) => (DegreeData::Constant(pd), delta),
        None => (m_star.map_or(DegreeData::Field(field), DegreeData::Constant), phi.clone()),
    };
    Ok(DegreeStage { section, straightening, homomorphism, degree, corr_cocycle, caveats })
}

/// Pushes `(x3-rotation by a fixed angle, x_coord^k)` through
/// `SO(3) × T → U(2)` and reports the scalar part of the composite degree.
fn u2_homomorphism_pipeline(flow: &TranslationFlow<f64>, coord: usize, k: i64, angle: f64, points: &[BasePoint<f64>], n: usize) -> LabResult<HomomorphismOut> {
    let d = flow.dim();
    let rotation = Cocycle::so3_rotation(flow, coord, 0, angle)?;
    let mut row = vec![0i64; d];
    row[coord] = k;
    let circle = Cocycle::torus_monomial(flow, vec![row])?;
    let src = HomSource::So3Torus { rotation: &rotation, circle: &circle };
    let sample = &points[..points.len().min(5)];
    let n = n.min(2_000);
    let chk = invariance_check_homomorphism(Homomorphism::So3TorusIso, src, flow, n, sample)?;
    let composite = liedeg_core::degree::compose(Homomorphism::So3TorusIso, src)?;
    let field = DegreeField::estimate(&composite, flow, sample, n);
    let s = field.mean().map(|m| p_ad(&m).to_matrix()[(0, 0)].im).unwrap_or(0.0);
    let mut tracker = BranchTracker::new();
    for i in 0..=LOOP_STEPS {
        let mut phases = sample[0].phases.clone();
        phases[coord] += i as f64 / LOOP_STEPS as f64;
        if let Some(m) = composite.eval(&BasePoint::new(phases)).matrix2() {
            tracker.push(&m);
        }
    }
    let monodromy = tracker.monodromy().unwrap_or(Branch::Plus);
    Ok(HomomorphismOut {
        homomorphism: Homomorphism::So3TorusIso.to_string(),
        max_deviation: chk.max_deviation,
        m_field_deviation: chk.m_field_deviation,
        n_used: n,
        composite_s: s,
        loop_flips: tracker.flips(),
        loop_monodromy: if monodromy == Branch::Plus { "+" } else { "-" }.into(),
        continuous_branch: monodromy == Branch::Plus,
        note: "values of the composite are defined up to sign; degrees are sign-insensitive".into(),
    })
}

fn probe_set(rep: &Representation<f64>, d: usize) -> LabResult<Vec<FiberVector<f64>>> {
    let mut e0 = vec![0i64; d];
    e0[0] = 1;
    let f = TrigPoly::constant(d, Complex::new(1.0, 0.0)).plus(e0, Complex::new(0.5, 0.0));
    (0..rep.dim().min(MAX_PROBES))
        .map(|k| {
            let coeffs = (0..rep.dim()).map(|i| if i == k { f.clone() } else { TrigPoly::zero(d) }).collect();
            Ok(FiberVector::from_trig(rep.clone(), 0, coeffs)?)
        })
        .collect()
}

fn slug(label: &str) -> String {
    label.chars().map(|c| match c {
        ':' | ',' => '_',
        '-' => 'm',
        c if c.is_ascii_alphanumeric() => c,
        _ => '_',
    }).collect()
}

fn verdict_out(v: &SpectralVerdict, files: &[(Option<String>, Option<String>)]) -> VerdictOut {
    VerdictOut {
        verdict: v.verdict.to_string(),
        hypotheses: v.hypotheses.iter().map(|h| HypothesisOut { name: h.name.clone(), status: h.status.to_string(), value: h.value }).collect(),
        probes: v
            .probes
            .iter()
            .zip(files.iter().chain(std::iter::repeat(&(None, None))))
            .map(|(p, (csv, svg))| ProbeOut {
                index: p.index,
                status: p.status.to_string(),
                c0: p.c0,
                tail_max: p.tail_max,
                wiener_final: p.wiener_final,
                flagged: p.flagged,
                csv: csv.clone(),
                svg: svg.clone(),
            })
            .collect(),
        notes: v.notes.clone(),
    }
}

fn spectral_stage(
    cfg: &ScenarioConfig,
    flow: &TranslationFlow<f64>,
    stage: &DegreeStage,
    reps: &[Representation<f64>],
    out: &Path,
    files: &mut Vec<String>,
) -> LabResult<Vec<SpectralSection>> {
    let d = flow.dim();
    let c = &stage.corr_cocycle;
    let quad = cfg.nodes.map(QuadratureSpec::new);
    let dini_quad = QuadratureSpec::new(if d == 1 { 64 } else { 16 });
    let mut sections = Vec::new();
    for (label, rep) in cfg.reps.iter().zip(reps) {
        let probes = probe_set(rep, d)?;
        let mix = mixing_verdict(rep, 0, c, flow, &stage.degree, &probes, cfg.n_corr, quad)?;
        let mut probe_files = Vec::new();
        for p in &mix.probes {
            let Some(s) = &p.series else {
                probe_files.push((None, None));
                continue;
            };
            let rows = series::rows(s);
            guard_finite("correlation series", rows.iter().flat_map(|r| [r.value.re, r.value.im]))?;
            let stem = format!("series_{}_k{}", slug(label), p.index);
            let (csv, svg) = (format!("{stem}.csv"), format!("{stem}.svg"));
            series::write_csv(&out.join(&csv), &rows)?;
            series::emit_plot(&out.join(&csv), &out.join(&svg))?;
            files.push(csv.clone());
            files.push(svg.clone());
            probe_files.push((Some(csv), Some(svg)));
        }
        let field = |x: &BasePoint<f64>| rep_lie_derivative(rep, c, x).expect("tags checked by the mixing verdict");
        let dini = dini_modulus(&field, flow, &log_grid(1e-6, 12), &dini_quad)?;
        let ac = ac_verdict(rep, 0, c, flow, &stage.degree, &dini)?;
        sections.push(SpectralSection {
            rep: label.clone(),
            j: 0,
            eigenvalues: mix.eigenvalues.clone(),
            kernel_indices: mix.kernel_indices.clone(),
            mixing: verdict_out(&mix, &probe_files),
            ac: verdict_out(&ac, &[]),
        });
    }
    Ok(sections)
}

/// Correlation series of probe `e_k` in block `(label, j = 0)` for the
/// configured cocycle itself.
pub fn probe_correlation(cfg: &ScenarioConfig, label: &str, k: usize) -> LabResult<Vec<series::SeriesRow>> {
    let flow = cfg.flow();
    let phi = cfg.cocycle.build(&flow)?;
    let rep = crate::config::parse_rep(label)?;
    if rep.tag() != phi.tag {
        return Err(LabError::Config(format!("{label} is not a representation of {}", phi.tag)));
    }
    let probes = probe_set(&rep, flow.dim())?;
    let p = probes.get(k).ok_or_else(|| LabError::Config(format!("probe index {k} out of range (at most {})", probes.len().saturating_sub(1))))?;
    let s = correlation_series(p, p, &phi, &flow, cfg.n_corr, cfg.nodes.map(QuadratureSpec::new))?;
    let rows = series::rows(&s);
    guard_finite("correlation series", rows.iter().flat_map(|r| [r.value.re, r.value.im]))?;
    Ok(rows)
}

fn write_json(path: &Path, value: &impl Serialize) -> LabResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| LabError::Numeric(format!("serialization failed: {e}")))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| LabError::io(path, e))
}

pub fn scenario_run(cfg: &ScenarioConfig) -> LabResult<RunOutput> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out).map_err(|e| LabError::io(&cfg.out, e))?;
    let mut timings = Vec::new();
    let t0 = Instant::now();
    let flow = cfg.flow();
    let phi = cfg.cocycle.build(&flow)?;
    let reps = cfg.representations()?;

    let stage = degree_stage(cfg, &flow, &phi, &reps)?;
    timings.push(("degree".to_string(), t0.elapsed().as_secs_f64()));

    let t1 = Instant::now();
    let mut files = Vec::new();
    let spectral = spectral_stage(cfg, &flow, &stage, &reps, &cfg.out, &mut files)?;
    timings.push(("spectral".to_string(), t1.elapsed().as_secs_f64()));

    let mut caveats = stage.caveats.clone();
    caveats.push("Dini regularity is checked on a finite grid and reported as heuristic".into());
    caveats.push("verdicts are finite-N observables, not proofs".into());
    if cfg.scenario == ScenarioName::U2Product {
        caveats.push("the U2 verdict cocycle is x^k times a constant SU2 lift (scalar part 2*pi*alpha*k); the SO3 x T composite has scalar part pi*alpha*k".into());
    }
    let report = RunReport {
        tool: ToolInfo { name: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION") },
        config: cfg.clone(),
        cocycle_note: phi.smoothness_note.clone(),
        base: BaseOut { dim: flow.dim(), alpha: flow.alpha.clone(), uniquely_ergodic: looks_uniquely_ergodic(&flow.alpha) },
        degree: stage.section,
        straightening: stage.straightening,
        homomorphism: stage.homomorphism,
        spectral,
        caveats,
        files,
        timings_file: TIMINGS_FILE,
    };
    let report_path = cfg.out.join(REPORT_FILE);
    write_json(&report_path, &report)?;
    timings.push(("total".to_string(), t0.elapsed().as_secs_f64()));
    let map: serde_json::Map<String, serde_json::Value> = timings.iter().map(|(k, v)| (k.clone(), serde_json::json!(v))).collect();
    write_json(&cfg.out.join(TIMINGS_FILE), &map)?;
    Ok(RunOutput { report, report_path, timings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_frequencies_are_not_uniquely_ergodic() {
        assert!(looks_uniquely_ergodic(&[(5f64.sqrt() - 1.0) / 2.0]));
        assert!(!looks_uniquely_ergodic(&[0.25]));
        assert!(!looks_uniquely_ergodic(&[2f64.sqrt() - 1.0, 2f64.sqrt()]));
    }

    #[test]
    fn odd_circle_powers_have_no_continuous_composite_branch() {
        let flow = TranslationFlow::new(vec![(5f64.sqrt() - 1.0) / 2.0]);
        let pts = vec![BasePoint::new(vec![0.3])];
        let odd = u2_homomorphism_pipeline(&flow, 0, 1, 0.7, &pts, 200).unwrap();
        assert_eq!((odd.loop_monodromy.as_str(), odd.continuous_branch), ("-", false));
        let even = u2_homomorphism_pipeline(&flow, 0, 2, 0.7, &pts, 200).unwrap();
        assert_eq!((even.loop_monodromy.as_str(), even.continuous_branch), ("+", true));
    }

    #[test]
    fn slugs_are_file_safe() {
        assert_eq!(slug("T:-3"), "T_m3");
        assert_eq!(slug("U2:2,1"), "U2_2_1");
    }
}
