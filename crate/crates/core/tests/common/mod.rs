//! Reference implementations shared by the integration tests. They work on
//! plain row lists and never touch the library's bit vectors or enumerator.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use freqspec::{parse_fimi, TransactionDatabase, WeightedPoint};
use rand::Rng;

pub type Rows = Vec<Vec<u64>>;

/// Random rows over items `0..n_items`, with row and item counts drawn from
/// the given ranges; each cell is set with probability `density`.
pub fn random_rows(
    rng: &mut impl Rng,
    n_rows: std::ops::RangeInclusive<usize>,
    n_items: std::ops::RangeInclusive<u64>,
    density: f64,
) -> Rows {
    let n_rows = rng.gen_range(n_rows);
    let n_items = rng.gen_range(n_items);
    (0..n_rows)
        .map(|_| (0..n_items).filter(|_| rng.gen_bool(density)).collect())
        .collect()
}

pub fn items_of(rows: &Rows) -> Vec<u64> {
    rows.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect()
}

fn support(rows: &Rows, set: &[u64]) -> usize {
    rows.iter().filter(|r| set.iter().all(|i| r.contains(i))).count()
}

/// Itemsets (empty set included) with support >= sigma, by trying every subset.
pub fn brute_force_count(rows: &Rows, sigma: usize) -> u64 {
    let items = items_of(rows);
    assert!(items.len() <= 20, "too many items for brute force");
    let mut count = 0;
    for mask in 0u32..(1 << items.len()) {
        let set: Vec<u64> = (0..items.len()).filter(|b| mask >> b & 1 == 1).map(|b| items[b]).collect();
        if support(rows, &set) >= sigma {
            count += 1;
        }
    }
    count
}

/// Exact expectation of the lattice path estimate: walks every root-to-border
/// path, weighting it by the product of `1/d` over its choices.
pub fn expected_lattice_estimate(rows: &Rows, sigma: usize) -> f64 {
    let items = items_of(rows);
    let cover: Vec<usize> = (0..rows.len()).collect();
    fn walk(rows: &Rows, items: &[u64], sigma: usize, chosen: &mut Vec<u64>, cover: &[usize], prob: f64, level: f64) -> f64 {
        let ext: Vec<(u64, Vec<usize>)> = items
            .iter()
            .filter(|i| !chosen.contains(i))
            .map(|&i| (i, cover.iter().copied().filter(|&r| rows[r].contains(&i)).collect::<Vec<_>>()))
            .filter(|(_, c)| c.len() >= sigma)
            .collect();
        let mut total = prob * level;
        let d = ext.len() as f64;
        let depth = chosen.len() as f64;
        for (i, c) in &ext {
            chosen.push(*i);
            total += walk(rows, items, sigma, chosen, c, prob / d, level * d / (depth + 1.0));
            chosen.pop();
        }
        total
    }
    if rows.len() < sigma {
        return 0.0;
    }
    walk(rows, &items, sigma, &mut Vec::new(), &cover, 1.0, 1.0)
}

/// Largest path depth over all paths at `sigma`, by exhaustion.
pub fn max_path_depth(rows: &Rows, sigma: usize) -> usize {
    let items = items_of(rows);
    fn walk(rows: &Rows, items: &[u64], sigma: usize, chosen: &mut Vec<u64>) -> usize {
        let mut best = chosen.len();
        for &i in items {
            if chosen.contains(&i) {
                continue;
            }
            chosen.push(i);
            if support(rows, chosen) >= sigma {
                best = best.max(walk(rows, items, sigma, chosen));
            }
            chosen.pop();
        }
        best
    }
    walk(rows, &items, sigma, &mut Vec::new())
}

/// Level-wise count of frequent itemsets (empty set included), for datasets
/// too wide for brute force but with few frequent itemsets.
pub fn levelwise_count(rows: &Rows, sigma: usize) -> u64 {
    if rows.len() < sigma {
        return 0;
    }
    let sets: Vec<BTreeSet<u64>> = rows.iter().map(|r| r.iter().copied().collect()).collect();
    let items = items_of(rows);
    let mut level: Vec<Vec<u64>> = vec![vec![]];
    let mut count = 1;
    while !level.is_empty() {
        let mut next = Vec::new();
        for set in &level {
            let start = set.last().map_or(0, |&l| items.partition_point(|&i| i <= l));
            for &i in &items[start..] {
                let mut cand = set.clone();
                cand.push(i);
                let s = sets.iter().filter(|r| cand.iter().all(|c| r.contains(c))).count();
                if s >= sigma {
                    next.push(cand);
                }
            }
        }
        count += next.len() as u64;
        level = next;
    }
    count
}

/// Least-squares non-increasing fit by trying every split of the sequence
/// into consecutive blocks, each fitted by its weighted mean.
pub fn exhaustive_decreasing_fit(points: &[WeightedPoint]) -> Vec<f64> {
    let n = points.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for cuts in 0u32..(1 << (n - 1)) {
        let mut fitted = Vec::with_capacity(n);
        let mut start = 0;
        for end in 1..=n {
            if end == n || cuts >> (end - 1) & 1 == 1 {
                let block = &points[start..end];
                let w: f64 = block.iter().map(|p| p.w).sum();
                let m = block.iter().map(|p| p.w * p.y).sum::<f64>() / w;
                fitted.extend(std::iter::repeat(m).take(end - start));
                start = end;
            }
        }
        if fitted.windows(2).any(|w| w[0] < w[1]) {
            continue;
        }
        let sse: f64 = points.iter().zip(&fitted).map(|(p, f)| p.w * (p.y - f).powi(2)).sum();
        if best.as_ref().map_or(true, |(b, _)| sse < *b) {
            best = Some((sse, fitted));
        }
    }
    best.expect("the single-block partition is always monotone").1
}

/// Textbook non-decreasing pool-adjacent-violators, run on reflected data.
pub fn increasing_pava(ys: &[f64], ws: &[f64]) -> Vec<f64> {
    let mut vals: Vec<(f64, f64, usize)> = Vec::new();
    for (&y, &w) in ys.iter().zip(ws) {
        vals.push((y, w, 1));
        while vals.len() > 1 {
            let (b, a) = (vals[vals.len() - 1], vals[vals.len() - 2]);
            if a.0 <= b.0 {
                break;
            }
            vals.truncate(vals.len() - 2);
            let w = a.1 + b.1;
            vals.push(((a.0 * a.1 + b.0 * b.1) / w, w, a.2 + b.2));
        }
    }
    vals.into_iter().flat_map(|(v, _, n)| std::iter::repeat(v).take(n)).collect()
}

pub fn data_dir() -> PathBuf {
    match std::env::var_os("FREQSPEC_DATA_DIR") {
        Some(d) => PathBuf::from(d),
        None => PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"),
    }
}

/// Loads `data/<name>.dat`, or explains where it was looked for.
pub fn load_dataset(name: &str) -> Result<TransactionDatabase, String> {
    let path = data_dir().join(format!("{name}.dat"));
    let file = std::fs::File::open(&path)
        .map_err(|e| format!("dataset missing: {} ({e}); set FREQSPEC_DATA_DIR", path.display()))?;
    parse_fimi(std::io::BufReader::new(file)).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn read_rows(name: &str) -> Result<Rows, String> {
    load_dataset(name).map(|db| db.rows())
}

/// Every root-to-border path at `sigma` as `(probability, branching)`, where
/// each step picks uniformly among the items that keep support >= sigma.
pub fn enumerate_paths(rows: &Rows, sigma: usize) -> Vec<(f64, Vec<u32>)> {
    let items = items_of(rows);
    let mut out = Vec::new();
    fn walk(
        rows: &Rows,
        items: &[u64],
        sigma: usize,
        chosen: &mut Vec<u64>,
        prob: f64,
        branching: &mut Vec<u32>,
        out: &mut Vec<(f64, Vec<u32>)>,
    ) {
        let ext: Vec<u64> = items
            .iter()
            .copied()
            .filter(|i| !chosen.contains(i))
            .filter(|&i| {
                rows.iter()
                    .filter(|r| r.contains(&i) && chosen.iter().all(|c| r.contains(c)))
                    .count()
                    >= sigma
            })
            .collect();
        if ext.is_empty() {
            out.push((prob, branching.clone()));
            return;
        }
        branching.push(ext.len() as u32);
        for &i in &ext {
            chosen.push(i);
            walk(rows, items, sigma, chosen, prob / ext.len() as f64, branching, out);
            chosen.pop();
        }
        branching.pop();
    }
    if rows.len() >= sigma {
        walk(rows, &items, sigma, &mut Vec::new(), 1.0, &mut Vec::new(), &mut out);
    }
    out
}
