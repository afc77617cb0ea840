//! 0/1 knapsack: exact (meet-in-the-middle or pseudo-polynomial DP) and an
//! FPTAS by value scaling.
//!
//! Solutions are lists of item ids in ascending order. Among optimal subsets
//! the lexicographically smallest id list is returned by the exact solvers.

use std::cmp::Ordering;

use crate::error::{Result, WtspError};

/// Item count up to which [`knapsack_exact`] enumerates half-subsets.
pub const MAX_ENUMERATION_ITEMS: usize = 25;

/// Largest DP table (items x capacity cells) the pseudo-polynomial route builds.
pub const MAX_DP_CELLS: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnapsackItem {
    pub id: usize,
    pub size: f64,
    pub value: f64,
}

impl KnapsackItem {
    pub fn new(id: usize, size: f64, value: f64) -> Self {
        KnapsackItem { id, size, value }
    }
}

fn check_items(items: &[KnapsackItem], budget: f64) -> Result<Vec<KnapsackItem>> {
    if budget.is_nan() || budget < 0.0 {
        return Err(WtspError::InvalidParameter(format!("knapsack budget must be >= 0, got {budget}")));
    }
    for it in items {
        if !(it.size.is_finite() && it.size >= 0.0 && it.value.is_finite() && it.value >= 0.0) {
            return Err(WtspError::InvalidParameter(format!(
                "item {} needs finite size >= 0 and value >= 0",
                it.id
            )));
        }
    }
    let mut sorted = items.to_vec();
    sorted.sort_by_key(|it| it.id);
    if sorted.windows(2).any(|w| w[0].id == w[1].id) {
        return Err(WtspError::InvalidParameter("duplicate knapsack item ids".into()));
    }
    Ok(sorted)
}

pub fn total_value(items: &[KnapsackItem], chosen: &[usize]) -> f64 {
    items.iter().filter(|it| chosen.contains(&it.id)).map(|it| it.value).sum()
}

pub fn total_size(items: &[KnapsackItem], chosen: &[usize]) -> f64 {
    items.iter().filter(|it| chosen.contains(&it.id)).map(|it| it.size).sum()
}

/// Maximum-value subset with total size at most `budget`.
///
/// Up to [`MAX_ENUMERATION_ITEMS`] items any real sizes are handled by
/// meet-in-the-middle. Larger inputs need integral sizes (pseudo-polynomial DP
/// over sizes); use [`knapsack_dp`] with a rounding granularity otherwise.
pub fn knapsack_exact(items: &[KnapsackItem], budget: f64) -> Result<Vec<usize>> {
    let sorted = check_items(items, budget)?;
    if sorted.len() <= MAX_ENUMERATION_ITEMS {
        return Ok(meet_in_the_middle(&sorted, budget));
    }
    if sorted.iter().all(|it| it.size.fract() == 0.0) {
        return knapsack_dp(items, budget, 1.0);
    }
    Err(WtspError::TooLarge {
        what: "exact knapsack with fractional sizes",
        n: sorted.len(),
        limit: MAX_ENUMERATION_ITEMS,
    })
}

/// Pseudo-polynomial DP after rounding sizes up to multiples of `granularity`
/// (and the budget down). Exact when all sizes are multiples of `granularity`;
/// otherwise the result is feasible but may be suboptimal.
pub fn knapsack_dp(items: &[KnapsackItem], budget: f64, granularity: f64) -> Result<Vec<usize>> {
    if !(granularity.is_finite() && granularity > 0.0) {
        return Err(WtspError::InvalidParameter(format!("granularity must be > 0, got {granularity}")));
    }
    let sorted = check_items(items, budget)?;
    let cap_f = (budget / granularity).floor();
    let m = sorted.len();
    let cells = (m + 1) as f64 * (cap_f + 1.0);
    if cells > MAX_DP_CELLS as f64 {
        return Err(WtspError::TooLarge {
            what: "knapsack DP table",
            n: cells as usize,
            limit: MAX_DP_CELLS,
        });
    }
    let cap = cap_f as usize;
    let sizes: Vec<usize> = sorted
        .iter()
        .map(|it| (it.size / granularity).ceil() as usize)
        .collect();
    // best[i][c]: max value from items i.. within capacity c (suffix table, so
    // the reconstruction can walk ids in ascending order)
    let mut best = vec![vec![0.0f64; cap + 1]; m + 1];
    for i in (0..m).rev() {
        let (lo, hi) = best.split_at_mut(i + 1);
        let (row, next) = (&mut lo[i], &hi[0]);
        for c in 0..=cap {
            let skip = next[c];
            row[c] = if sizes[i] <= c {
                skip.max(next[c - sizes[i]] + sorted[i].value)
            } else {
                skip
            };
        }
    }
    let mut chosen = Vec::new();
    let mut c = cap;
    let mut need = best[0][cap];
    let done = value_tol(need);
    for i in 0..m {
        if need <= done {
            break;
        }
        if sizes[i] <= c && sorted[i].value + best[i + 1][c - sizes[i]] >= best[i][c] - value_tol(best[i][c]) {
            chosen.push(sorted[i].id);
            c -= sizes[i];
            need -= sorted[i].value;
        }
    }
    Ok(chosen)
}

fn value_tol(v: f64) -> f64 {
    1e-12 * v.abs().max(1.0)
}

#[derive(Clone)]
struct Half {
    size: f64,
    value: f64,
    ids: Vec<usize>,
}

/// All subsets of `items` with sums accumulated in a fixed order.
fn subsets(items: &[KnapsackItem]) -> Vec<Half> {
    let k = items.len();
    let mut out: Vec<Half> = Vec::with_capacity(1 << k);
    out.push(Half {
        size: 0.0,
        value: 0.0,
        ids: Vec::new(),
    });
    for mask in 1usize..(1 << k) {
        let low = mask.trailing_zeros() as usize;
        let base = &out[mask & (mask - 1)];
        let mut ids = Vec::with_capacity(base.ids.len() + 1);
        ids.push(items[low].id);
        ids.extend_from_slice(&base.ids);
        out.push(Half {
            size: base.size + items[low].size,
            value: base.value + items[low].value,
            ids,
        });
    }
    out
}

/// Higher value first, then the lexicographically smaller id list.
fn better(a_value: f64, a_ids: &[usize], b_value: f64, b_ids: &[usize]) -> bool {
    match a_value.partial_cmp(&b_value) {
        Some(Ordering::Greater) => true,
        Some(Ordering::Less) => false,
        _ => a_ids < b_ids,
    }
}

fn meet_in_the_middle(sorted: &[KnapsackItem], budget: f64) -> Vec<usize> {
    let mid = sorted.len().div_ceil(2);
    let (low, high) = sorted.split_at(mid);
    let left = subsets(low);
    let mut right = subsets(high);
    right.sort_by(|a, b| a.size.total_cmp(&b.size));
    // prefix_best[r]: best subset among right[..=r]
    let mut prefix_best: Vec<usize> = Vec::with_capacity(right.len());
    for r in 0..right.len() {
        let keep = match prefix_best.last() {
            Some(&p) if !better(right[r].value, &right[r].ids, right[p].value, &right[p].ids) => p,
            _ => r,
        };
        prefix_best.push(keep);
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for l in &left {
        if l.size > budget {
            continue;
        }
        let room = budget - l.size;
        let fit = right.partition_point(|r| r.size <= room);
        if fit == 0 {
            continue;
        }
        let r = &right[prefix_best[fit - 1]];
        // left ids all precede right ids, so for a fixed left part the lex
        // order of the union is the lex order of the right part
        let value = l.value + r.value;
        let mut ids = l.ids.clone();
        ids.extend_from_slice(&r.ids);
        if best.as_ref().is_none_or(|(bv, bi)| better(value, &ids, *bv, bi)) {
            best = Some((value, ids));
        }
    }
    best.map(|(_, ids)| ids).unwrap_or_default()
}

/// Value-scaling FPTAS: total value at least `(1 - epsilon)` times optimal.
pub fn knapsack_fptas(items: &[KnapsackItem], budget: f64, epsilon: f64) -> Result<Vec<usize>> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(WtspError::InvalidParameter(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let sorted = check_items(items, budget)?;
    let usable: Vec<&KnapsackItem> = sorted
        .iter()
        .filter(|it| it.size <= budget && it.value > 0.0)
        .collect();
    let Some(v_max) = usable.iter().map(|it| it.value).reduce(f64::max) else {
        return Ok(Vec::new());
    };
    let m = usable.len();
    let scale = epsilon * v_max / m as f64;
    let scaled: Vec<usize> = usable.iter().map(|it| (it.value / scale).floor() as usize).collect();
    let total: usize = scaled.iter().sum();
    // min_size[i][p]: smallest total size reaching scaled value exactly p using items ..i
    let mut min_size = vec![vec![f64::INFINITY; total + 1]; m + 1];
    min_size[0][0] = 0.0;
    for i in 0..m {
        let (lo, hi) = min_size.split_at_mut(i + 1);
        let (prev, row) = (&lo[i], &mut hi[0]);
        row.copy_from_slice(prev);
        for p in scaled[i]..=total {
            let take = prev[p - scaled[i]] + usable[i].size;
            if take < row[p] {
                row[p] = take;
            }
        }
    }
    let p_best = (0..=total).rev().find(|&p| min_size[m][p] <= budget).unwrap_or(0);
    let mut chosen = Vec::new();
    let mut p = p_best;
    for i in (0..m).rev() {
        if min_size[i + 1][p] != min_size[i][p] {
            chosen.push(usable[i].id);
            p -= scaled[i];
        }
    }
    chosen.reverse();
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn items(sizes: &[f64], values: &[f64]) -> Vec<KnapsackItem> {
        sizes
            .iter()
            .zip(values)
            .enumerate()
            .map(|(i, (&s, &v))| KnapsackItem::new(i + 1, s, v))
            .collect()
    }

    /// Reference: plain 2^m enumeration, lexicographic tie-break.
    fn enumerate(items: &[KnapsackItem], budget: f64) -> (f64, Vec<usize>) {
        let m = items.len();
        let mut best = (0.0, Vec::new());
        for mask in 0u32..(1 << m) {
            let chosen: Vec<&KnapsackItem> = (0..m).filter(|b| mask >> b & 1 == 1).map(|b| &items[b]).collect();
            let size: f64 = chosen.iter().map(|it| it.size).sum();
            if size > budget {
                continue;
            }
            let value: f64 = chosen.iter().map(|it| it.value).sum();
            let mut ids: Vec<usize> = chosen.iter().map(|it| it.id).collect();
            ids.sort();
            if value > best.0 || (value == best.0 && ids < best.1) {
                best = (value, ids);
            }
        }
        best
    }

    #[test]
    fn small_instance_matches_enumeration() {
        let its = items(&[2.0, 3.0, 4.0], &[3.0, 4.0, 5.0]);
        let (v, ids) = enumerate(&its, 6.0);
        assert_eq!((v, ids.clone()), (8.0, vec![1, 3]));
        assert_eq!(knapsack_exact(&its, 6.0).unwrap(), ids);
        assert_eq!(knapsack_dp(&its, 6.0, 1.0).unwrap(), ids);
    }

    #[test]
    fn unconstrained_budget_takes_everything() {
        let its = items(&[2.0, 3.0, 4.0], &[3.0, 4.0, 5.0]);
        assert_eq!(knapsack_exact(&its, 100.0).unwrap(), vec![1, 2, 3]);
        assert_eq!(knapsack_fptas(&its, 100.0, 0.5).unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn empty_items() {
        assert!(knapsack_exact(&[], 5.0).unwrap().is_empty());
        assert!(knapsack_fptas(&[], 5.0, 0.1).unwrap().is_empty());
    }

    #[test]
    fn negative_budget_and_bad_epsilon_are_errors() {
        let its = items(&[1.0], &[1.0]);
        assert!(knapsack_exact(&its, -1.0).is_err());
        assert!(knapsack_fptas(&its, 1.0, 0.0).is_err());
        assert!(knapsack_fptas(&its, 1.0, 1.0).is_err());
    }

    #[test]
    fn fptas_single_fitting_item() {
        let its = items(&[3.0], &[7.0]);
        assert_eq!(knapsack_fptas(&its, 5.0, 0.5).unwrap(), vec![1]);
    }

    #[test]
    fn zero_budget_keeps_only_zero_size_items() {
        let its = items(&[0.0, 1.0, 0.0], &[2.0, 5.0, 1.0]);
        assert_eq!(knapsack_exact(&its, 0.0).unwrap(), vec![1, 3]);
        let f = knapsack_fptas(&its, 0.0, 0.3).unwrap();
        assert!(f.iter().all(|id| *id != 2));
    }

    #[test]
    fn ties_prefer_lexicographically_smaller_sets() {
        let its = items(&[1.0, 1.0, 1.0], &[2.0, 1.0, 1.0]);
        // {1,2} and {1,3} both reach 3 within budget 2
        assert_eq!(knapsack_exact(&its, 2.0).unwrap(), vec![1, 2]);
        assert_eq!(knapsack_dp(&its, 2.0, 1.0).unwrap(), vec![1, 2]);
    }

    #[test]
    fn large_integral_instance_uses_dp() {
        let its: Vec<_> = (0..30).map(|i| KnapsackItem::new(i, (i % 7 + 1) as f64, (i % 5 + 1) as f64)).collect();
        let chosen = knapsack_exact(&its, 20.0).unwrap();
        assert!(total_size(&its, &chosen) <= 20.0);
        let frac: Vec<_> = its.iter().map(|it| KnapsackItem { size: it.size + 0.5, ..*it }).collect();
        assert!(knapsack_exact(&frac, 20.0).is_err());
    }

    #[test]
    fn rounded_dp_stays_feasible() {
        let its = items(&[1.3, 2.7, 0.4, 3.3], &[2.0, 5.0, 1.0, 6.0]);
        let chosen = knapsack_dp(&its, 4.0, 0.5).unwrap();
        assert!(total_size(&its, &chosen) <= 4.0);
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let its = vec![KnapsackItem::new(1, 1.0, 1.0), KnapsackItem::new(1, 2.0, 1.0)];
        assert!(knapsack_exact(&its, 3.0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn instance() -> impl Strategy<Value = (Vec<KnapsackItem>, f64)> {
            (
                prop::collection::vec((0u32..20, 0u32..30), 0..15),
                0u32..60,
            )
                .prop_map(|(raw, b)| {
                    let its = raw
                        .into_iter()
                        .enumerate()
                        .map(|(i, (s, v))| KnapsackItem::new(i, s as f64 * 0.5, v as f64))
                        .collect();
                    (its, b as f64)
                })
        }

        proptest! {
            #[test]
            fn exact_matches_enumeration((its, budget) in instance()) {
                let (v, ids) = enumerate(&its, budget);
                let got = knapsack_exact(&its, budget).unwrap();
                prop_assert_eq!(total_value(&its, &got), v);
                prop_assert_eq!(got, ids);
            }

            #[test]
            fn dp_matches_enumeration((its, budget) in instance()) {
                let (v, _) = enumerate(&its, budget);
                let got = knapsack_dp(&its, budget, 0.5).unwrap();
                prop_assert!(total_size(&its, &got) <= budget);
                prop_assert_eq!(total_value(&its, &got), v);
            }

            #[test]
            fn fptas_is_feasible_and_near_optimal((its, budget) in instance(), eps in 0.05f64..0.95) {
                let opt = total_value(&its, &knapsack_exact(&its, budget).unwrap());
                let got = knapsack_fptas(&its, budget, eps).unwrap();
                prop_assert!(total_size(&its, &got) <= budget);
                prop_assert!(total_value(&its, &got) >= (1.0 - eps) * opt - 1e-9);
            }
        }
    }
}
