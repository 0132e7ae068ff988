//! Single- and double-selection treatment-effect estimators.
//!
//! Every estimator ends with an HC1-robust OLS of `y` on
//! `[1, d, selected controls]`. Single selection picks controls from the
//! outcome equation with `d` kept in the model (unpenalized for Lasso
//! selectors, forced for the GETS engine). Double selection picks controls
//! from `y ~ X` and from `d ~ X` separately and uses their union.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gets::{block_select, GetsConfig, SelectionResult};
use crate::lasso::{
    adaptive_weights, cross_validate, fit_problem, CvChoice, Mix, PenaltyKind, PenaltySpec,
    Problem,
};
use crate::numkit::dist::t_quantile;
use crate::numkit::{ols_fit, FitSummary, Matrix, Robust};
use crate::simlab::substream;

/// Exponent of the adaptive weights `|mu_j|^-eta`.
pub const ADAPTIVE_ETA: f64 = 1.0;
/// Default confidence level of reported intervals.
pub const DEFAULT_LEVEL: f64 = 0.90;

/// Data-generating truth attached to simulated datasets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub delta: f64,
    /// Columns of `X` with non-zero coefficients.
    pub relevant: Vec<usize>,
}

/// Outcome `y`, treatment `d` and candidate controls `x` (one column per
/// name in `names`).
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub y: Vec<f64>,
    pub d: Vec<f64>,
    pub x: Matrix,
    pub names: Vec<String>,
    pub truth: Option<Truth>,
}

impl Dataset {
    pub fn new(y: Vec<f64>, d: Vec<f64>, x: Matrix, names: Vec<String>) -> Result<Self> {
        let n = y.len();
        if d.len() != n || x.nrows() != n {
            return Err(Error::Dimension(format!(
                "y has {n} rows, d {}, X {}",
                d.len(),
                x.nrows()
            )));
        }
        if names.len() != x.ncols() {
            return Err(Error::Dimension(format!(
                "{} names for {} columns",
                names.len(),
                x.ncols()
            )));
        }
        if y.iter().chain(&d).chain(x.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Domain("dataset contains non-finite values".into()));
        }
        Ok(Dataset {
            y,
            d,
            x,
            names,
            truth: None,
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Index of the control called `name`.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn with_treatment_first(&self) -> Matrix {
        self.x.clone().insert_column(0, 0.0).set_column_from(0, &self.d)
    }
}

trait SetColumn {
    fn set_column_from(self, j: usize, v: &[f64]) -> Self;
}

impl SetColumn for Matrix {
    fn set_column_from(mut self, j: usize, v: &[f64]) -> Self {
        self.column_mut(j).copy_from_slice(v);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    PostLasso,
    PostAdaptiveLasso,
    PostElasticnet,
    Autometrics,
    PostDoubleLasso,
    PostDoubleAdaptiveLasso,
    PostDoubleElasticnet,
    PostDoubleAutometrics,
    OlsAll,
    OlsNone,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::PostLasso,
        Family::PostAdaptiveLasso,
        Family::PostElasticnet,
        Family::Autometrics,
        Family::PostDoubleLasso,
        Family::PostDoubleAdaptiveLasso,
        Family::PostDoubleElasticnet,
        Family::PostDoubleAutometrics,
        Family::OlsAll,
        Family::OlsNone,
    ];

    pub fn is_double(self) -> bool {
        matches!(
            self,
            Family::PostDoubleLasso
                | Family::PostDoubleAdaptiveLasso
                | Family::PostDoubleElasticnet
                | Family::PostDoubleAutometrics
        )
    }

    pub fn is_lasso(self) -> bool {
        matches!(
            self,
            Family::PostLasso
                | Family::PostAdaptiveLasso
                | Family::PostElasticnet
                | Family::PostDoubleLasso
                | Family::PostDoubleAdaptiveLasso
                | Family::PostDoubleElasticnet
        )
    }

    pub fn is_gets(self) -> bool {
        matches!(self, Family::Autometrics | Family::PostDoubleAutometrics)
    }

    fn adaptive(self) -> bool {
        matches!(self, Family::PostAdaptiveLasso | Family::PostDoubleAdaptiveLasso)
    }

    /// snake_case name used on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Family::PostLasso => "post_lasso",
            Family::PostAdaptiveLasso => "post_adaptive_lasso",
            Family::PostElasticnet => "post_elasticnet",
            Family::Autometrics => "autometrics",
            Family::PostDoubleLasso => "post_double_lasso",
            Family::PostDoubleAdaptiveLasso => "post_double_adaptive_lasso",
            Family::PostDoubleElasticnet => "post_double_elasticnet",
            Family::PostDoubleAutometrics => "post_double_autometrics",
            Family::OlsAll => "ols_all",
            Family::OlsNone => "ols_none",
        }
    }

    /// Look up a family by name (`post_double_lasso`) or abbreviation
    /// (`PDL`), ignoring case.
    pub fn from_name(name: &str) -> Option<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(name) || f.abbrev().eq_ignore_ascii_case(name))
    }

    fn abbrev(self) -> &'static str {
        match self {
            Family::PostLasso => "PL",
            Family::PostAdaptiveLasso => "PAL",
            Family::PostElasticnet => "PEN",
            Family::Autometrics => "A",
            Family::PostDoubleLasso => "PDL",
            Family::PostDoubleAdaptiveLasso => "PDAL",
            Family::PostDoubleElasticnet => "PDEN",
            Family::PostDoubleAutometrics => "PDA",
            Family::OlsAll => "OLS",
            Family::OlsNone => "OLS-none",
        }
    }
}

/// An estimator: a family plus its tuning block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalty: Option<PenaltySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gets: Option<GetsConfig>,
}

impl MethodSpec {
    fn lasso(family: Family, penalty: PenaltySpec) -> Self {
        MethodSpec {
            family,
            penalty: Some(penalty),
            gets: None,
        }
    }

    fn elastic(family: Family, penalty: PenaltySpec) -> Self {
        let penalty = match penalty.mix {
            Mix::Fixed(m) if m == 1.0 => penalty.with_mix(Mix::CrossValidated),
            _ => penalty,
        };
        Self::lasso(family, penalty)
    }

    fn gets_family(family: Family, alpha: f64) -> Self {
        MethodSpec {
            family,
            penalty: None,
            gets: Some(GetsConfig::new(alpha)),
        }
    }

    pub fn post_lasso(penalty: PenaltySpec) -> Self {
        Self::lasso(Family::PostLasso, penalty)
    }
    pub fn post_adaptive_lasso(penalty: PenaltySpec) -> Self {
        Self::lasso(Family::PostAdaptiveLasso, penalty)
    }
    /// A pure-Lasso `mix` is replaced by a cross-validated one.
    pub fn post_elasticnet(penalty: PenaltySpec) -> Self {
        Self::elastic(Family::PostElasticnet, penalty)
    }
    pub fn autometrics(alpha: f64) -> Self {
        Self::gets_family(Family::Autometrics, alpha)
    }
    pub fn post_double_lasso(penalty: PenaltySpec) -> Self {
        Self::lasso(Family::PostDoubleLasso, penalty)
    }
    pub fn post_double_adaptive_lasso(penalty: PenaltySpec) -> Self {
        Self::lasso(Family::PostDoubleAdaptiveLasso, penalty)
    }
    /// A pure-Lasso `mix` is replaced by a cross-validated one.
    pub fn post_double_elasticnet(penalty: PenaltySpec) -> Self {
        Self::elastic(Family::PostDoubleElasticnet, penalty)
    }
    pub fn post_double_autometrics(alpha: f64) -> Self {
        Self::gets_family(Family::PostDoubleAutometrics, alpha)
    }
    pub fn ols_all() -> Self {
        MethodSpec {
            family: Family::OlsAll,
            penalty: None,
            gets: None,
        }
    }
    pub fn ols_none() -> Self {
        MethodSpec {
            family: Family::OlsNone,
            penalty: None,
            gets: None,
        }
    }

    /// Build from a family name and an optional tuning block.
    pub fn from_parts(
        family: Family,
        penalty: Option<PenaltySpec>,
        alpha: Option<f64>,
    ) -> Result<Self> {
        let m = if family.is_lasso() {
            let pen = penalty.ok_or_else(|| {
                Error::Usage(format!("{} needs a penalty", family.name()))
            })?;
            match family {
                Family::PostElasticnet | Family::PostDoubleElasticnet => Self::elastic(family, pen),
                _ => Self::lasso(family, pen),
            }
        } else if family.is_gets() {
            let a = alpha.ok_or_else(|| Error::Usage(format!("{} needs --alpha", family.name())))?;
            Self::gets_family(family, a)
        } else {
            MethodSpec {
                family,
                penalty: None,
                gets: None,
            }
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.family;
        match (&self.penalty, &self.gets) {
            (Some(p), None) if f.is_lasso() => p.validate(),
            (None, Some(g)) if f.is_gets() => g.validate(),
            (None, None) if !f.is_lasso() && !f.is_gets() => Ok(()),
            _ => Err(Error::Config(format!(
                "{} needs exactly its own tuning block ({})",
                f.name(),
                if f.is_lasso() {
                    "penalty"
                } else if f.is_gets() {
                    "gets"
                } else {
                    "none"
                }
            ))),
        }
    }

    /// Short report label such as `PDL-min`, `PDA-5%` or `OLS`.
    pub fn label(&self) -> String {
        let base = self.family.abbrev();
        if let Some(p) = &self.penalty {
            format!("{base}-{}", p.tag())
        } else if let Some(g) = &self.gets {
            format!("{base}-{}%", (g.alpha * 1e6).round() / 1e4)
        } else {
            base.to_string()
        }
    }
}

/// Confidence interval; `degenerate` when the standard error is zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
    pub degenerate: bool,
}

impl Interval {
    pub fn contains(&self, v: f64) -> bool {
        self.low <= v && v <= self.high
    }
}

/// Final-stage estimate of the treatment effect.
#[derive(Clone, Debug)]
pub struct TreatmentEstimate {
    pub delta_hat: f64,
    /// HC1 standard error.
    pub se: f64,
    pub ci: Interval,
    pub level: f64,
    /// Selected controls (columns of `X`), ascending.
    pub support_union: Vec<usize>,
    pub k_star: usize,
    /// Per-equation selections: none for the OLS benchmarks, one for single
    /// selection, outcome then treatment equation for double selection.
    pub per_equation: Vec<SelectionResult>,
    /// OLS of `y` on `[1, d, controls]`.
    pub final_fit: FitSummary,
}

impl TreatmentEstimate {
    /// Whether the interval excludes zero.
    pub fn significant(&self) -> bool {
        !self.ci.contains(0.0)
    }
}

/// `delta_hat ± t_{dof, (1 + level) / 2} se` for coefficient `index`.
pub fn treatment_ci(fit: &FitSummary, index: usize, level: f64) -> Result<Interval> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!("level must lie in (0, 1), got {level}")));
    }
    let b = fit.coefficients[index];
    let se = fit.se(index);
    if !(se > 0.0) {
        return Ok(Interval {
            low: b,
            high: b,
            degenerate: true,
        });
    }
    let half = t_quantile(0.5 + level / 2.0, fit.dof as f64) * se;
    Ok(Interval {
        low: b - half,
        high: b + half,
        degenerate: false,
    })
}

/// HC1 OLS of `y` on `[1, d, X_controls]`.
pub fn final_stage(
    data: &Dataset,
    controls: &[usize],
    level: f64,
    per_equation: Vec<SelectionResult>,
) -> Result<TreatmentEstimate> {
    let n = data.n();
    let mut support: Vec<usize> = controls.to_vec();
    support.sort_unstable();
    support.dedup();
    if support.len() + 2 >= n {
        let count = |i: usize| per_equation.get(i).map_or(0, |r| r.unforced().len());
        return Err(Error::SupportOverflow {
            outcome_eq: count(0),
            treatment_eq: count(1),
            selected: support.len(),
            n,
        });
    }
    let mut design = Matrix::zeros(n, support.len() + 2);
    design.column_mut(0).fill(1.0);
    design.column_mut(1).copy_from_slice(&data.d);
    for (k, &j) in support.iter().enumerate() {
        design.column_mut(k + 2).copy_from(&data.x.column(j));
    }
    let fit = ols_fit(&design, &data.y, Robust::Hc1)?;
    let ci = treatment_ci(&fit, 1, level)?;
    Ok(TreatmentEstimate {
        delta_hat: fit.coefficients[1],
        se: fit.se(1),
        ci,
        level,
        k_star: support.len(),
        support_union: support,
        per_equation,
        final_fit: fit,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Equation {
    /// `y ~ [d, X]`, `d` unpenalized or forced.
    Single,
    /// `y ~ X`
    Outcome,
    /// `d ~ X`
    Treatment,
}

/// Per-dataset cache shared by the methods evaluated on one dataset:
/// standardized problems, adaptive weights and CV curves (a `min` and a
/// `1se` method on the same equation share one cross-validation).
pub struct Workspace<'a> {
    data: &'a Dataset,
    seed: u64,
    level: f64,
    problems: HashMap<Equation, Problem>,
    weights: HashMap<Equation, Vec<f64>>,
    curves: HashMap<(Equation, bool, u64), CvChoice>,
}

impl<'a> Workspace<'a> {
    /// `seed` drives cross-validation folds; each equation gets its own
    /// substream.
    pub fn new(data: &'a Dataset, seed: u64) -> Self {
        Workspace {
            data,
            seed,
            level: DEFAULT_LEVEL,
            problems: HashMap::new(),
            weights: HashMap::new(),
            curves: HashMap::new(),
        }
    }

    pub fn with_level(mut self, level: f64) -> Self {
        self.level = level;
        self
    }

    fn problem(&mut self, eq: Equation) -> Result<&Problem> {
        if !self.problems.contains_key(&eq) {
            let d = self.data;
            let p = match eq {
                Equation::Single => Problem::new(&d.with_treatment_first(), &d.y)?,
                Equation::Outcome => Problem::new(&d.x, &d.y)?,
                Equation::Treatment => Problem::new(&d.x, &d.d)?,
            };
            self.problems.insert(eq, p);
        }
        Ok(&self.problems[&eq])
    }

    fn lasso_select(
        &mut self,
        eq: Equation,
        spec: &PenaltySpec,
        adaptive: bool,
    ) -> Result<SelectionResult> {
        let unpen: &[usize] = if eq == Equation::Single { &[0] } else { &[] };
        let seed = substream(self.seed, eq as u64, 0);
        self.problem(eq)?;
        if adaptive && !self.weights.contains_key(&eq) {
            let pr = &self.problems[&eq];
            let w = adaptive_weights(&pr.xs, &pr.ys, ADAPTIVE_ETA)?;
            self.weights.insert(eq, w);
        }
        let weights = if adaptive {
            Some(self.weights[&eq].as_slice())
        } else {
            None
        };
        let pr = &self.problems[&eq];
        let cv_kind = matches!(spec.kind, PenaltyKind::CvMin | PenaltyKind::Cv1se);
        let key = (
            eq,
            adaptive,
            match spec.mix {
                Mix::Fixed(m) => m.to_bits(),
                Mix::CrossValidated => u64::MAX,
            },
        );
        if cv_kind && !self.curves.contains_key(&key) {
            let c = cross_validate(pr, unpen, weights, spec.mix, seed)?;
            self.curves.insert(key, c);
        }
        let sel = fit_problem(pr, unpen, spec, weights, seed, self.curves.get(&key))?;
        let selected: Vec<usize> = match eq {
            Equation::Single => sel.fit.support.iter().filter(|&&j| j > 0).map(|j| j - 1).collect(),
            _ => sel.fit.support.clone(),
        };
        Ok(SelectionResult {
            selected,
            forced: vec![],
            retained: vec![],
            tstats: vec![],
            paths_explored: 0,
            terminal_count: 1,
            diagnostics_passed: true,
            tuning_used: sel.lambda,
        })
    }

    fn gets_eq(&mut self, eq: Equation, config: &GetsConfig) -> Result<SelectionResult> {
        let d = self.data;
        match eq {
            Equation::Single => {
                let r = block_select(&d.with_treatment_first(), &d.y, &[0], config)?;
                let keep: Vec<usize> = (0..r.selected.len()).filter(|&i| r.selected[i] > 0).collect();
                Ok(SelectionResult {
                    tstats: keep.iter().filter_map(|&i| r.tstats.get(i).copied()).collect(),
                    selected: keep.iter().map(|&i| r.selected[i] - 1).collect(),
                    retained: r.retained.iter().filter(|&&j| j > 0).map(|j| j - 1).collect(),
                    forced: vec![],
                    ..r
                })
            }
            Equation::Outcome => block_select(&d.x, &d.y, &[], config),
            Equation::Treatment => block_select(&d.x, &d.d, &[], config),
        }
    }

    fn select(&mut self, eq: Equation, method: &MethodSpec) -> Result<SelectionResult> {
        match (&method.penalty, &method.gets) {
            (Some(p), _) => self.lasso_select(eq, p, method.family.adaptive()),
            (_, Some(g)) => self.gets_eq(eq, g),
            _ => unreachable!("validated tuning block"),
        }
    }

    /// Evaluate `method` on the workspace's dataset.
    pub fn estimate(&mut self, method: &MethodSpec) -> Result<TreatmentEstimate> {
        method.validate()?;
        let level = self.level;
        match method.family {
            Family::OlsAll => {
                let all: Vec<usize> = (0..self.data.p()).collect();
                final_stage(self.data, &all, level, vec![])
            }
            Family::OlsNone => final_stage(self.data, &[], level, vec![]),
            f if f.is_double() => {
                let s1 = self.select(Equation::Outcome, method)?;
                let s2 = self.select(Equation::Treatment, method)?;
                let union: Vec<usize> = s1.selected.iter().chain(&s2.selected).copied().collect();
                final_stage(self.data, &union, level, vec![s1, s2])
            }
            _ => {
                let s = self.select(Equation::Single, method)?;
                let controls = s.selected.clone();
                final_stage(self.data, &controls, level, vec![s])
            }
        }
    }
}

/// Single-selection estimate (Post-Lasso family or GETS with `d` forced).
pub fn post_single(data: &Dataset, method: &MethodSpec, seed: u64) -> Result<TreatmentEstimate> {
    if method.family.is_double() || !(method.family.is_lasso() || method.family.is_gets()) {
        return Err(Error::Usage(format!(
            "{} is not a single-selection method",
            method.family.name()
        )));
    }
    Workspace::new(data, seed).estimate(method)
}

/// Double-selection estimate on the union of both equations' selections.
pub fn post_double(data: &Dataset, method: &MethodSpec, seed: u64) -> Result<TreatmentEstimate> {
    if !method.family.is_double() {
        return Err(Error::Usage(format!(
            "{} is not a double-selection method",
            method.family.name()
        )));
    }
    Workspace::new(data, seed).estimate(method)
}

/// OLS of `y` on `d` and every control.
pub fn ols_all(data: &Dataset) -> Result<TreatmentEstimate> {
    Workspace::new(data, 0).estimate(&MethodSpec::ols_all())
}

/// OLS of `y` on `d` alone.
pub fn ols_none(data: &Dataset) -> Result<TreatmentEstimate> {
    Workspace::new(data, 0).estimate(&MethodSpec::ols_none())
}

/// Any method.
pub fn estimate(data: &Dataset, method: &MethodSpec, seed: u64) -> Result<TreatmentEstimate> {
    Workspace::new(data, seed).estimate(method)
}
