use super::engine::check_forced;
use super::{gets_select, GetsConfig, SelectionResult};
use crate::error::{Error, Result};
use crate::numkit::{select_columns, Matrix};

const MAX_ROUNDS: usize = 10;

/// Run [`gets_select`] on `forced ∪ cols` and map the result back to the
/// column indices of `x`.
fn gets_on(
    x: &Matrix,
    y: &[f64],
    forced: &[usize],
    cols: &[usize],
    config: &GetsConfig,
) -> Result<SelectionResult> {
    let mut all: Vec<usize> = forced.iter().chain(cols).copied().collect();
    all.sort_unstable();
    all.dedup();
    let sub = select_columns(x, &all);
    let local_forced: Vec<usize> = all
        .iter()
        .enumerate()
        .filter(|(_, j)| forced.contains(j))
        .map(|(i, _)| i)
        .collect();
    let mut r = gets_select(&sub, y, &local_forced, config)?;
    r.selected = r.selected.iter().map(|&i| all[i]).collect();
    r.retained = r.retained.iter().map(|&i| all[i]).collect();
    r.forced = forced.to_vec();
    Ok(r)
}

/// Block search for GUMs with too many candidates to estimate.
///
/// Unforced candidates are split into contiguous blocks of at most
/// `block_cap` columns; each block is searched together with the forced
/// columns and the union of block survivors becomes the next round's
/// candidate set. Rounds stop once the candidates fit a single block, stop
/// shrinking, or after ten rounds; a final search runs on what is left.
/// Inputs small enough for a single GUM go straight to [`gets_select`].
pub fn block_select(
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
    let nf = forced.len();
    let unforced: Vec<usize> = (0..p).filter(|j| !forced.contains(j)).collect();
    if unforced.len() + nf + 1 < n {
        return gets_select(x, y, &forced, config);
    }
    let cap = match config.block_cap {
        Some(c) => c,
        None => (n / 2).saturating_sub(nf + 1),
    };
    if cap < 2 {
        return Err(Error::Config(format!(
            "block_cap must be >= 2 (n = {n}, {nf} forced columns give {cap})"
        )));
    }
    if cap + nf + 1 >= n {
        return Err(Error::Config(format!(
            "block_cap {cap} with {nf} forced columns is not estimable from {n} observations"
        )));
    }

    let mut candidates = unforced;
    let mut paths = 0;
    for _ in 0..MAX_ROUNDS {
        if candidates.len() <= cap {
            break;
        }
        let mut survivors = Vec::new();
        for block in candidates.chunks(cap) {
            let r = gets_on(x, y, &forced, block, config)?;
            paths += r.paths_explored;
            survivors.extend(r.unforced());
        }
        survivors.sort_unstable();
        if survivors == candidates {
            break;
        }
        candidates = survivors;
    }
    if candidates.len() + nf + 1 >= n {
        return Err(Error::Degenerate(format!(
            "block search kept {} candidates, too many for a final GUM with n = {n}",
            candidates.len()
        )));
    }
    let mut r = gets_on(x, y, &forced, &candidates, config)?;
    r.paths_explored += paths;
    Ok(r)
}
