//! Scenario configuration: JSON input with per-scenario defaults, resolved
//! into a fully populated [`ScenarioConfig`] that is echoed in the report.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use liedeg_core::dynamics::{manufactured_su2, Cocycle, PhaseFunction, TranslationFlow};
use liedeg_core::group::AlgebraElement;
use liedeg_core::rep::Representation;
use liedeg_core::GroupTag;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioName {
    AnzaiTorus,
    TorusGeneral,
    Su2Straighten,
    So3MaximalTorus,
    U2Product,
    Custom,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 6] = [
        ScenarioName::AnzaiTorus,
        ScenarioName::TorusGeneral,
        ScenarioName::Su2Straighten,
        ScenarioName::So3MaximalTorus,
        ScenarioName::U2Product,
        ScenarioName::Custom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::AnzaiTorus => "anzai-torus",
            ScenarioName::TorusGeneral => "torus-general",
            ScenarioName::Su2Straighten => "su2-straighten",
            ScenarioName::So3MaximalTorus => "so3-maximal-torus",
            ScenarioName::U2Product => "u2-product",
            ScenarioName::Custom => "custom",
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioName {
    type Err = LabError;

    fn from_str(s: &str) -> LabResult<Self> {
        Self::ALL.into_iter().find(|n| n.as_str() == s).ok_or_else(|| LabError::Config(format!("unknown scenario '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub freq: Vec<i64>,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
}

/// Built-in cocycle families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builtin", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CocycleSpec {
    /// `y_r = Π_c x_c^{K[r][c]}` in `T^{rows}`.
    TorusMonomial { exponents: Vec<Vec<i64>> },
    /// Circle-valued `exp(i s(x))` with `s` linear plus trigonometric.
    TorusTrig {
        winding: Vec<f64>,
        #[serde(default)]
        offset: f64,
        #[serde(default)]
        terms: Vec<TrigTerm>,
    },
    Su2Diagonal { coord: usize, k: i64 },
    /// `ζ⁻¹ δ (ζ∘F_1)` with `δ = diag(x_0^k, conj x_0^k)` and a fixed
    /// trigonometric `ζ`.
    Su2Manufactured { k: i64 },
    So3Rotation {
        coord: usize,
        k: i64,
        #[serde(default)]
        offset: f64,
    },
    /// `x_coord^k · diag(e^{iβ/2}, e^{-iβ/2})`: the circle factor times the
    /// SU(2) lift of the x3-rotation by `angle = β`.
    U2Product { coord: usize, k: i64, angle: f64 },
}

/// Which closed form (if any) supplies the constant degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeRoute {
    /// `π∘φ` diagonal over a uniquely ergodic base: `∫ M_φ`.
    Diagonal,
    /// `T_φ` assumed uniquely ergodic: `P_Ad ∫ M_φ`.
    Ergodic,
    /// No closed form; Cesàro field only.
    Field,
}

impl CocycleSpec {
    pub fn target(&self) -> GroupTag {
        match self {
            CocycleSpec::TorusMonomial { exponents } => GroupTag::Torus(exponents.len()),
            CocycleSpec::TorusTrig { .. } => GroupTag::Torus(1),
            CocycleSpec::Su2Diagonal { .. } | CocycleSpec::Su2Manufactured { .. } => GroupTag::Su2,
            CocycleSpec::So3Rotation { .. } => GroupTag::So3,
            CocycleSpec::U2Product { .. } => GroupTag::U2,
        }
    }

    pub fn route(&self) -> DegreeRoute {
        match self {
            CocycleSpec::Su2Manufactured { .. } => DegreeRoute::Field,
            CocycleSpec::U2Product { .. } => DegreeRoute::Ergodic,
            _ => DegreeRoute::Diagonal,
        }
    }

    fn validate(&self, dim: usize) -> LabResult<()> {
        let coord_ok = |c: usize| if c < dim { Ok(()) } else { Err(LabError::Config(format!("coordinate {c} out of range for base dimension {dim}"))) };
        match self {
            CocycleSpec::TorusMonomial { exponents } => {
                if exponents.is_empty() || exponents.iter().any(|r| r.len() != dim) {
                    return Err(LabError::Config(format!("torus-monomial exponents must be a nonempty matrix with {dim} columns")));
                }
                Ok(())
            }
            CocycleSpec::TorusTrig { winding, terms, .. } => {
                if winding.len() != dim || terms.iter().any(|t| t.freq.len() != dim) {
                    return Err(LabError::Config(format!("torus-trig winding and frequencies need {dim} entries")));
                }
                if winding.iter().any(|w| w.fract() != 0.0) {
                    return Err(LabError::Config("torus-trig winding must be integral".into()));
                }
                Ok(())
            }
            CocycleSpec::Su2Diagonal { coord, .. } | CocycleSpec::So3Rotation { coord, .. } | CocycleSpec::U2Product { coord, .. } => coord_ok(*coord),
            CocycleSpec::Su2Manufactured { .. } => coord_ok(0),
        }
    }

    pub fn build(&self, flow: &TranslationFlow<f64>) -> LabResult<Cocycle<f64>> {
        let d = flow.dim();
        Ok(match self {
            CocycleSpec::TorusMonomial { exponents } => Cocycle::torus_monomial(flow, exponents.clone())?,
            CocycleSpec::TorusTrig { winding, offset, terms } => {
                let mut s = PhaseFunction::constant(d, *offset);
                s.winding = winding.clone();
                for t in terms {
                    s = s.with_term(t.freq.clone(), t.a, t.b);
                }
                let dir = AlgebraElement::basis(GroupTag::Torus(1))[0].clone();
                Cocycle::exp_product(GroupTag::Torus(1), flow, vec![(s, dir)], "circle-valued trigonometric phase, analytic")?
            }
            CocycleSpec::Su2Diagonal { coord, k } => Cocycle::su2_diagonal(flow, *coord, *k)?,
            CocycleSpec::Su2Manufactured { k } => manufactured_su2(flow, *k)?.phi,
            CocycleSpec::So3Rotation { coord, k, offset } => Cocycle::so3_rotation(flow, *coord, *k, *offset)?,
            CocycleSpec::U2Product { coord, k, angle } => {
                let z = PhaseFunction::linear(d, *coord, *k as f64);
                let lift = (PhaseFunction::constant(d, 0.5 * angle), AlgebraElement::su2_diag(1.0));
                Cocycle::u2_product(flow, z, vec![lift])?
            }
        })
    }
}

/// Representation label syntax: `T:q1,q2,…`, `SU2:l`, `SO3:l`, `U2:l,m`.
pub fn parse_rep(label: &str) -> LabResult<Representation<f64>> {
    let bad = || LabError::Config(format!("cannot parse representation label '{label}'"));
    let (group, args) = label.split_once(':').ok_or_else(bad)?;
    let ints: Vec<i64> = args.split(',').map(|s| s.trim().parse::<i64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let nonneg = |v: i64| u32::try_from(v).map_err(|_| bad());
    let rep = match (group.trim().to_ascii_uppercase().as_str(), ints.as_slice()) {
        ("T", q) if !q.is_empty() => Representation::torus(q.to_vec()),
        ("SU2", [l]) => Representation::new(GroupTag::Su2, liedeg_core::RepLabel::Su2(nonneg(*l)?))?,
        ("SO3", [l]) => Representation::new(GroupTag::So3, liedeg_core::RepLabel::So3(nonneg(*l)?))?,
        ("U2", [l, m]) => Representation::new(GroupTag::U2, liedeg_core::RepLabel::U2(nonneg(*l)?, *m))?,
        _ => return Err(bad()),
    };
    Ok(rep)
}

/// Config file contents; every field is optional and filled from the
/// scenario defaults.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: Option<ScenarioName>,
    pub dim: Option<usize>,
    pub alpha: Option<Vec<f64>>,
    pub cocycle: Option<CocycleSpec>,
    pub reps: Option<Vec<String>>,
    pub n_degree: Option<usize>,
    pub n_corr: Option<usize>,
    pub nodes: Option<usize>,
    pub degree_points: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))
    }
}

/// Fully resolved configuration, echoed verbatim in the report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub scenario: ScenarioName,
    pub dim: usize,
    pub alpha: Vec<f64>,
    pub cocycle: CocycleSpec,
    pub reps: Vec<String>,
    pub n_degree: usize,
    pub n_corr: usize,
    /// Per-dimension correlation quadrature nodes; `None` sizes the grid
    /// from the cocycle's frequency bound.
    pub nodes: Option<usize>,
    pub degree_points: usize,
    pub seed: u64,
    #[serde(skip)]
    pub out: PathBuf,
}

fn golden() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

fn range_labels(prefix: &str, range: std::ops::RangeInclusive<i64>) -> Vec<String> {
    range.map(|v| format!("{prefix}:{v}")).collect()
}

impl ScenarioConfig {
    /// Defaults for a named scenario.
    pub fn defaults(name: ScenarioName) -> LabResult<Self> {
        let base = |dim: usize, cocycle: CocycleSpec, reps: Vec<String>| {
            let alpha = if dim == 1 { vec![golden()] } else { TranslationFlow::<f64>::default_for_dim(dim).alpha };
            ScenarioConfig {
                scenario: name,
                dim,
                alpha,
                cocycle,
                reps,
                n_degree: 10_000,
                n_corr: 50,
                nodes: None,
                degree_points: 20,
                seed: 0,
                out: PathBuf::from("out").join(name.as_str()),
            }
        };
        Ok(match name {
            ScenarioName::AnzaiTorus => base(1, CocycleSpec::TorusMonomial { exponents: vec![vec![1]] }, range_labels("T", -3..=3)),
            ScenarioName::TorusGeneral => {
                let cocycle = CocycleSpec::TorusTrig {
                    winding: vec![1.0, 2.0],
                    offset: 0.0,
                    terms: vec![TrigTerm { freq: vec![1, 0], a: 0.3, b: 0.0 }, TrigTerm { freq: vec![0, 1], a: 0.0, b: -0.2 }],
                };
                let mut c = base(2, cocycle, range_labels("T", -2..=2));
                // The trigonometric phase only has an effective frequency
                // bound; 512 nodes per dimension resolve lags up to 30.
                c.n_corr = 30;
                c.nodes = Some(512);
                c
            }
            ScenarioName::Su2Straighten => base(1, CocycleSpec::Su2Manufactured { k: 1 }, range_labels("SU2", 0..=4)),
            ScenarioName::So3MaximalTorus => base(1, CocycleSpec::So3Rotation { coord: 0, k: 1, offset: 0.0 }, range_labels("SO3", 0..=3)),
            ScenarioName::U2Product => {
                let reps = [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2), (3, 1), (3, 2)].iter().map(|(l, m)| format!("U2:{l},{m}")).collect();
                base(1, CocycleSpec::U2Product { coord: 0, k: 1, angle: 0.7 }, reps)
            }
            ScenarioName::Custom => return Err(LabError::Config("scenario 'custom' needs a config with a cocycle and reps".into())),
        })
    }

    /// Merges a config file over the defaults of `name` (the file's own
    /// scenario field wins when `name` is absent).
    pub fn resolve(name: Option<ScenarioName>, file: ConfigFile) -> LabResult<Self> {
        let name = match (name, file.scenario) {
            (Some(a), Some(b)) if a != b => return Err(LabError::Config(format!("scenario '{a}' conflicts with config scenario '{b}'"))),
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(LabError::Config("no scenario given".into())),
        };
        let mut cfg = if name == ScenarioName::Custom {
            let cocycle = file.cocycle.clone().ok_or_else(|| LabError::Config("custom scenario needs a cocycle".into()))?;
            let reps = file.reps.clone().ok_or_else(|| LabError::Config("custom scenario needs reps".into()))?;
            let dim = file.dim.or(file.alpha.as_ref().map(Vec::len)).unwrap_or(1);
            let mut c = Self::defaults(ScenarioName::AnzaiTorus)?;
            c.scenario = name;
            c.dim = dim;
            c.alpha = if dim == 1 { vec![golden()] } else { TranslationFlow::<f64>::default_for_dim(dim).alpha };
            c.cocycle = cocycle;
            c.reps = reps;
            c.out = PathBuf::from("out").join(name.as_str());
            c
        } else {
            Self::defaults(name)?
        };
        if let Some(d) = file.dim {
            if d != cfg.dim && file.alpha.is_none() {
                cfg.alpha = if d == 1 { vec![golden()] } else { TranslationFlow::<f64>::default_for_dim(d).alpha };
            }
            cfg.dim = d;
        }
        if let Some(a) = file.alpha {
            cfg.alpha = a;
        }
        if let Some(c) = file.cocycle {
            cfg.cocycle = c;
        }
        if let Some(r) = file.reps {
            cfg.reps = r;
        }
        cfg.n_degree = file.n_degree.unwrap_or(cfg.n_degree);
        cfg.n_corr = file.n_corr.unwrap_or(cfg.n_corr);
        cfg.nodes = file.nodes.or(cfg.nodes);
        cfg.degree_points = file.degree_points.unwrap_or(cfg.degree_points);
        cfg.seed = file.seed.unwrap_or(cfg.seed);
        if let Some(o) = file.out {
            cfg.out = o;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> LabResult<()> {
        if self.dim == 0 || self.alpha.len() != self.dim {
            return Err(LabError::Config(format!("alpha has {} entries for base dimension {}", self.alpha.len(), self.dim)));
        }
        if self.alpha.iter().any(|a| !a.is_finite()) {
            return Err(LabError::Config("alpha must be finite".into()));
        }
        if self.n_degree < 2 || self.n_corr < 2 {
            return Err(LabError::Config("N_degree and N_corr must be at least 2".into()));
        }
        if self.degree_points == 0 || self.nodes == Some(0) {
            return Err(LabError::Config("degree_points and nodes must be positive".into()));
        }
        if self.reps.is_empty() {
            return Err(LabError::Config("at least one representation is required".into()));
        }
        self.cocycle.validate(self.dim)?;
        let target = self.cocycle.target();
        for label in &self.reps {
            let rep = parse_rep(label)?;
            if rep.tag() != target {
                return Err(LabError::Config(format!("representation {label} is not a representation of {target}")));
            }
        }
        Ok(())
    }

    pub fn flow(&self) -> TranslationFlow<f64> {
        TranslationFlow::new(self.alpha.clone())
    }

    pub fn representations(&self) -> LabResult<Vec<Representation<f64>>> {
        self.reps.iter().map(|l| parse_rep(l)).collect()
    }
}
