use std::collections::HashMap;

use super::{GetsConfig, SelectionResult, Tiebreak};
use crate::error::{Error, Result};
use crate::numkit::dist::{chi2_critical, chi2_sf, f_critical, t_critical};
use crate::numkit::{check_full_rank, Matrix};

/// `n ln(rss / n) + (k + 1) ln n` for `k` slopes plus an intercept.
pub fn bic(rss: f64, n: usize, k: usize) -> f64 {
    let nf = n as f64;
    nf * (rss / nf).ln() + (k + 1) as f64 * nf.ln()
}

/// Centred data and its cross products.
pub(super) struct Data {
    n: usize,
    xc: Matrix,
    yc: Vec<f64>,
    gram: Matrix,
    xty: Vec<f64>,
}

impl Data {
    pub fn new(x: &Matrix, y: &[f64]) -> Self {
        let n = x.nrows();
        let mut xc = x.clone();
        for mut col in xc.column_iter_mut() {
            let m = col.mean();
            col.add_scalar_mut(-m);
        }
        let ym = y.iter().sum::<f64>() / n as f64;
        let yc: Vec<f64> = y.iter().map(|v| v - ym).collect();
        let gram = xc.tr_mul(&xc);
        let xty = (0..x.ncols())
            .map(|j| xc.column(j).iter().zip(&yc).map(|(a, b)| a * b).sum())
            .collect();
        Data {
            n,
            xc,
            yc,
            gram,
            xty,
        }
    }

    fn col(&self, j: usize) -> &[f64] {
        &self.xc.as_slice()[j * self.n..(j + 1) * self.n]
    }

    fn yty(&self) -> f64 {
        self.yc.iter().map(|v| v * v).sum()
    }
}

/// An OLS model on a subset of columns, carried with `(X_A'X_A)^-1`.
#[derive(Clone, Debug)]
struct Model {
    cols: Vec<usize>,
    inv: Matrix,
    b: Vec<f64>,
    rss: f64,
}

impl Model {
    fn fit(data: &Data, cols: &[usize]) -> Option<Model> {
        let k = cols.len();
        let yty = data.yty();
        if k == 0 {
            return Some(Model {
                cols: vec![],
                inv: Matrix::zeros(0, 0),
                b: vec![],
                rss: yty,
            });
        }
        let sub = Matrix::from_fn(k, k, |a, c| data.gram[(cols[a], cols[c])]);
        let inv = sub.cholesky()?.inverse();
        let rhs: Vec<f64> = cols.iter().map(|&j| data.xty[j]).collect();
        let b: Vec<f64> = (0..k)
            .map(|a| (0..k).map(|c| inv[(a, c)] * rhs[c]).sum())
            .collect();
        let fitted: f64 = b.iter().zip(&rhs).map(|(u, v)| u * v).sum();
        Some(Model {
            cols: cols.to_vec(),
            inv,
            b,
            rss: (yty - fitted).max(0.0),
        })
    }

    fn k(&self) -> usize {
        self.cols.len()
    }

    fn dof(&self, n: usize) -> usize {
        n - self.k() - 1
    }

    fn tstats(&self, n: usize) -> Vec<f64> {
        self.tstats_with(self.rss / self.dof(n) as f64)
    }

    fn tstats_with(&self, s2: f64) -> Vec<f64> {
        (0..self.k())
            .map(|q| {
                let v = s2 * self.inv[(q, q)];
                if v > 0.0 {
                    self.b[q] / v.sqrt()
                } else {
                    f64::NAN
                }
            })
            .collect()
    }

    /// Drop the column at position `q` by a rank-one downdate of the inverse.
    fn without(&self, q: usize) -> Model {
        let k = self.k();
        let src = self.inv.as_slice();
        let piv = src[q * k + q];
        let colq = &src[q * k..(q + 1) * k];
        let mut dst = Vec::with_capacity((k - 1) * (k - 1));
        for c in (0..k).filter(|&c| c != q) {
            let f = colq[c] / piv;
            let srcc = &src[c * k..(c + 1) * k];
            let row = |a: usize| srcc[a] - colq[a] * f;
            dst.extend((0..q).map(row));
            dst.extend((q + 1..k).map(row));
        }
        let inv = Matrix::from_vec(k - 1, k - 1, dst);
        let bq = self.b[q];
        let mut cols = Vec::with_capacity(k - 1);
        let mut b = Vec::with_capacity(k - 1);
        for a in (0..k).filter(|&a| a != q) {
            cols.push(self.cols[a]);
            b.push(self.b[a] - colq[a] * bq / piv);
        }
        Model {
            cols,
            inv,
            b,
            rss: self.rss + bq * bq / piv,
        }
    }

    fn residuals(&self, data: &Data) -> Vec<f64> {
        let mut e = data.yc.clone();
        for (q, &j) in self.cols.iter().enumerate() {
            let bq = self.b[q];
            for (ei, x) in e.iter_mut().zip(data.col(j)) {
                *ei -= x * bq;
            }
        }
        e
    }

    /// Jarque–Bera and Breusch–Pagan statistics of the model's residuals.
    fn diagnostic_stats(&self, data: &Data) -> (f64, f64) {
        let n = data.n;
        let e = self.residuals(data);
        let nf = n as f64;
        let mean = e.iter().sum::<f64>() / nf;
        let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
        for v in &e {
            let d = v - mean;
            let d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
        }
        if !(m2 > 0.0) {
            return (0.0, 0.0);
        }
        let (m2, m3, m4) = (m2 / nf, m3 / nf, m4 / nf);
        let skew = m3 / m2.powf(1.5);
        let kurt = m4 / (m2 * m2);
        let jb = nf * (skew * skew / 6.0 + (kurt - 3.0).powi(2) / 24.0);

        let k = self.k();
        if k == 0 {
            return (jb, 0.0);
        }
        let u: Vec<f64> = e.iter().map(|v| v * v).collect();
        let ubar = u.iter().sum::<f64>() / nf;
        let uc: Vec<f64> = u.iter().map(|v| v - ubar).collect();
        let tss: f64 = uc.iter().map(|v| v * v).sum();
        if !(tss > 0.0) {
            return (jb, 0.0);
        }
        let s: Vec<f64> = self
            .cols
            .iter()
            .map(|&j| data.col(j).iter().zip(&uc).map(|(a, b)| a * b).sum())
            .collect();
        let mut ess = 0.0;
        for c in 0..k {
            let col = self.inv.column(c);
            let mut row = 0.0;
            for a in 0..k {
                row += col[a] * s[a];
            }
            ess += s[c] * row;
        }
        (jb, nf * (ess / tss).clamp(0.0, 1.0))
    }

    /// Jarque–Bera and Breusch–Pagan p-values.
    fn diagnostics(&self, data: &Data) -> (f64, f64) {
        let (jb, bp) = self.diagnostic_stats(data);
        let bp_p = if self.k() == 0 { 1.0 } else { chi2_sf(bp, self.k() as f64) };
        (chi2_sf(jb, 2.0), bp_p)
    }
}

#[derive(Clone, Debug)]
struct Terminal {
    model: Model,
    retained: Vec<usize>,
}

struct Search<'a> {
    data: &'a Data,
    forced: Vec<bool>,
    alpha: f64,
    diag_level: f64,
    track_normality: bool,
    track_hetero: bool,
    gum_rss: f64,
    gum_k: usize,
    words: usize,
    valid_cache: HashMap<Vec<u64>, bool>,
    memo: HashMap<Vec<u64>, usize>,
    terminals: Vec<Terminal>,
    paths: usize,
}

impl Search<'_> {
    fn bits(&self, cols: &[usize], out: &mut Vec<u64>) {
        let start = out.len();
        out.resize(start + self.words, 0);
        for &j in cols {
            out[start + j / 64] |= 1 << (j % 64);
        }
    }

    fn state_key(&self, cols: &[usize], retained: &[usize]) -> Vec<u64> {
        let mut key = Vec::with_capacity(2 * self.words);
        self.bits(cols, &mut key);
        self.bits(retained, &mut key);
        key
    }

    fn diagnostics_ok(&self, model: &Model) -> bool {
        let (jb, bp) = model.diagnostic_stats(self.data);
        let level = self.diag_level;
        (!self.track_normality || jb <= chi2_critical(level, 2))
            && (!self.track_hetero || model.k() == 0 || bp <= chi2_critical(level, model.k()))
    }

    fn backtest_ok(&self, model: &Model) -> bool {
        if model.k() >= self.gum_k {
            return true;
        }
        let dof = self.data.n - self.gum_k - 1;
        let dropped = self.gum_k - model.k();
        let f = ((model.rss - self.gum_rss).max(0.0) / dropped as f64) / (self.gum_rss / dof as f64);
        f <= f_critical(self.alpha, dropped, dof)
    }

    /// Backtest against the GUM, cached per column set.
    fn valid(&mut self, model: &Model) -> bool {
        let mut key = Vec::with_capacity(self.words);
        self.bits(&model.cols, &mut key);
        if let Some(&v) = self.valid_cache.get(&key) {
            return v;
        }
        let v = self.backtest_ok(model);
        self.valid_cache.insert(key, v);
        v
    }

    /// Deletion candidates of `model`: unforced, not retained and
    /// insignificant, least significant first. Significance uses the GUM
    /// error variance and degrees of freedom throughout the search.
    fn candidates(&self, model: &Model, retained: &[usize]) -> Vec<usize> {
        let dof = self.data.n - self.gum_k - 1;
        let crit = t_critical(self.alpha, dof);
        let ts = model.tstats_with(self.gum_rss / dof as f64);
        let mut cand: Vec<(f64, usize)> = (0..model.k())
            .filter(|&q| {
                let j = model.cols[q];
                !self.forced[j] && !retained.contains(&j)
            })
            .map(|q| {
                let t = ts[q].abs();
                (if t.is_nan() { 0.0 } else { t }, q)
            })
            .filter(|(t, _)| *t < crit)
            .collect();
        cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(model.cols[a.1].cmp(&model.cols[b.1])));
        cand.into_iter().map(|(_, q)| q).collect()
    }

    /// Follow least-significant-first deletions to a terminal. Diagnostics
    /// are checked only at the terminal; if they fail, the path backs up to
    /// the latest model on it that passes.
    fn run_path(&mut self, mut state: Model, mut retained: Vec<usize>) -> usize {
        let mut visited = Vec::new();
        let mut trail: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        loop {
            let key = self.state_key(&state.cols, &retained);
            if let Some(&t) = self.memo.get(&key) {
                for v in visited {
                    self.memo.insert(v, t);
                }
                return t;
            }
            visited.push(key);
            let cand = self.candidates(&state, &retained);
            let Some(&q) = cand.first() else {
                let mut terminal = Terminal {
                    model: state,
                    retained,
                };
                if !self.diagnostics_ok(&terminal.model) {
                    while let Some((cols, kept)) = trail.pop() {
                        let m = Model::fit(self.data, &cols).expect("subset of a full-rank GUM");
                        if self.diagnostics_ok(&m) {
                            // what is still deletable here was kept by the diagnostics
                            let mut retained = kept;
                            retained.extend(self.candidates(&m, &retained).iter().map(|&q| m.cols[q]));
                            retained.sort_unstable();
                            terminal = Terminal { model: m, retained };
                            break;
                        }
                    }
                }
                let id = self.terminals.len();
                self.terminals.push(terminal);
                for v in visited {
                    self.memo.insert(v, id);
                }
                return id;
            };
            let next = state.without(q);
            if self.valid(&next) {
                trail.push((state.cols.clone(), retained.clone()));
                state = next;
            } else {
                retained.push(state.cols[q]);
                retained.sort_unstable();
            }
        }
    }

    /// Open a path whose first step deletes the variable at position `q`.
    fn open_path(&mut self, gum: &Model, q: usize) -> usize {
        self.paths += 1;
        let first = gum.without(q);
        if self.valid(&first) {
            self.run_path(first, vec![])
        } else {
            self.run_path(gum.clone(), vec![gum.cols[q]])
        }
    }
}

pub(super) fn check_forced(forced: &[usize], p: usize) -> Result<Vec<usize>> {
    let mut f = forced.to_vec();
    f.sort_unstable();
    f.dedup();
    if let Some(&j) = f.iter().find(|&&j| j >= p) {
        return Err(Error::Dimension(format!("forced column {j} out of range (p = {p})")));
    }
    Ok(f)
}

/// Multi-path general-to-specific search over the columns of `x` (an
/// intercept is always included and never removed). Columns in `forced`
/// survive every reduction.
pub fn gets_select(
    x: &Matrix,
    y: &[f64],
    forced: &[usize],
    config: &GetsConfig,
) -> Result<SelectionResult> {
    config.validate()?;
    let (n, p) = x.shape();
    if n != y.len() {
        return Err(Error::Dimension(format!("X has {n} rows, y has {}", y.len())));
    }
    let forced = check_forced(forced, p)?;
    if p + 2 > n {
        return Err(Error::Dimension(format!(
            "GUM with {p} regressors and an intercept is not estimable from {n} observations; \
             use block_select"
        )));
    }
    let data = Data::new(x, y);
    let all: Vec<usize> = (0..p).collect();
    let gum = match Model::fit(&data, &all) {
        Some(m) => m,
        None => {
            let design = x.clone().insert_column(0, 1.0);
            check_full_rank(&design).map_err(|e| match e {
                Error::Singular { columns } => Error::Singular {
                    columns: columns.into_iter().filter(|&c| c > 0).map(|c| c - 1).collect(),
                },
                other => other,
            })?;
            return Err(Error::Singular { columns: vec![] });
        }
    };
    let yscale = data.yty().max(f64::MIN_POSITIVE);
    if !(gum.rss > 1e-14 * yscale) {
        return Err(Error::Degenerate("GUM fits the outcome exactly".into()));
    }
    let (jb, bp) = gum.diagnostics(&data);
    let gum_passed = jb >= config.diag_level && bp >= config.diag_level;

    let mut forced_mask = vec![false; p];
    for &j in &forced {
        forced_mask[j] = true;
    }
    let mut search = Search {
        data: &data,
        forced: forced_mask,
        alpha: config.alpha,
        diag_level: config.diag_level,
        track_normality: jb >= config.diag_level,
        track_hetero: bp >= config.diag_level,
        gum_rss: gum.rss,
        gum_k: p,
        words: p.div_ceil(64).max(1),
        valid_cache: HashMap::new(),
        memo: HashMap::new(),
        terminals: Vec::new(),
        paths: 0,
    };
    let budget = config.path_budget(p);

    let mut current = gum.clone();
    let mut previous: Option<Vec<usize>> = None;
    let finals: Vec<Terminal> = loop {
        let cand = search.candidates(&current, &[]);
        let exhausted = !cand.is_empty() && search.paths >= budget;
        let open: Vec<usize> = cand
            .into_iter()
            .take(budget.saturating_sub(search.paths))
            .collect();
        if open.is_empty() {
            // Out of paths, or nothing left to delete: keep the last round's
            // terminals unless the current model is itself an acceptable one.
            let fallback = previous.as_ref().filter(|_| {
                exhausted || !(search.valid(&current) && search.diagnostics_ok(&current))
            });
            break match fallback {
                Some(ids) => ids.iter().map(|&i| search.terminals[i].clone()).collect(),
                None => vec![Terminal {
                    model: current,
                    retained: vec![],
                }],
            };
        }
        let mut ids: Vec<usize> = open.iter().map(|&q| search.open_path(&current, q)).collect();
        ids.sort_unstable();
        ids.dedup();
        let mut union: Vec<usize> = ids
            .iter()
            .flat_map(|&i| search.terminals[i].model.cols.iter().copied())
            .collect();
        union.sort_unstable();
        union.dedup();
        if union.len() < current.k() {
            current = Model::fit(&data, &union).expect("subset of a full-rank GUM");
            previous = Some(ids);
        } else {
            break ids.iter().map(|&i| search.terminals[i].clone()).collect();
        }
    };

    let best = match config.tiebreak {
        Tiebreak::Bic => {
            let score = |t: &Terminal| bic(t.model.rss, n, t.model.k());
            let mut best = 0;
            for i in 1..finals.len() {
                if score(&finals[i]) < score(&finals[best]) {
                    best = i;
                }
            }
            &finals[best]
        }
    };
    let (jb, bp) = best.model.diagnostics(&data);
    Ok(SelectionResult {
        selected: best.model.cols.clone(),
        forced,
        retained: best.retained.clone(),
        tstats: best.model.tstats(n),
        paths_explored: search.paths,
        terminal_count: finals.len(),
        diagnostics_passed: gum_passed && jb >= config.diag_level && bp >= config.diag_level,
        tuning_used: config.alpha,
    })
}
