//! Variation and selection operators on priority lists.

use std::cmp::Ordering;
use std::collections::HashSet;

use rand::Rng;

use super::Candidate;
use crate::model::PartIdx;
use crate::scalar::Scalar;

/// Head `parent1[..k]`, then the remaining parts in `parent2` order.
pub fn crossover_at(parent1: &[PartIdx], parent2: &[PartIdx], k: usize) -> Vec<PartIdx> {
    let k = k.min(parent1.len());
    let head: HashSet<PartIdx> = parent1[..k].iter().copied().collect();
    let mut child = parent1[..k].to_vec();
    child.extend(parent2.iter().copied().filter(|p| !head.contains(p)));
    child
}

/// One-point crossover with the cut drawn uniformly from `1..M`.
pub fn crossover_1pt<R: Rng + ?Sized>(parent1: &[PartIdx], parent2: &[PartIdx], rng: &mut R) -> Vec<PartIdx> {
    if parent1.len() < 2 {
        return parent1.to_vec();
    }
    let k = rng.gen_range(1..parent1.len());
    crossover_at(parent1, parent2, k)
}

/// Moves the element at `from` so that it ends up at index `to`.
pub fn reposition(list: &[PartIdx], from: usize, to: usize) -> Vec<PartIdx> {
    let mut child = list.to_vec();
    let x = child.remove(from);
    child.insert(to, x);
    child
}

/// Moves one random part to a different random index. Lists shorter than
/// two are returned unchanged.
pub fn mutate_reposition<R: Rng + ?Sized>(parent: &[PartIdx], rng: &mut R) -> Vec<PartIdx> {
    let m = parent.len();
    if m < 2 {
        return parent.to_vec();
    }
    let from = rng.gen_range(0..m);
    let mut to = rng.gen_range(0..m - 1);
    if to >= from {
        to += 1;
    }
    reposition(parent, from, to)
}

fn cmp_scalar<S: Scalar>(a: S, b: S) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

/// Total order used for ranking: more placed parts first, then the smaller
/// distance. An undefined distance ranks after a defined one and ties with
/// another undefined one.
pub fn rank<S: Scalar>(a: &Candidate<S>, b: &Candidate<S>) -> Ordering {
    b.placed.cmp(&a.placed).then_with(|| match (a.dist, b.dist) {
        (Some(x), Some(y)) => cmp_scalar(x, y),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    })
}

/// `s1` is at least as good as `s2`: higher satisfaction ratio, or equal
/// ratio and no larger distance.
pub fn is_better<S: Scalar>(s1: &Candidate<S>, s2: &Candidate<S>) -> bool {
    rank(s1, s2) != Ordering::Greater
}

/// Tournament with replacement; the earliest drawn entrant wins ties.
pub fn tournament<'p, S: Scalar, R: Rng + ?Sized>(
    pop: &'p [Candidate<S>],
    size: usize,
    rng: &mut R,
) -> &'p Candidate<S> {
    let mut best = &pop[rng.gen_range(0..pop.len())];
    for _ in 1..size.max(1) {
        let c = &pop[rng.gen_range(0..pop.len())];
        if rank(c, best) == Ordering::Less {
            best = c;
        }
    }
    best
}

/// Keeps the best `pop.len()` unique priority lists of both populations.
///
/// Offspring are listed before the current population so that the stable
/// sort breaks ties in their favour. When fewer unique lists exist than
/// slots, the best ones are repeated.
pub fn merge_populations<S: Scalar>(pop: Vec<Candidate<S>>, interpop: Vec<Candidate<S>>) -> Vec<Candidate<S>> {
    let n = pop.len();
    let mut all: Vec<Candidate<S>> = interpop.into_iter().chain(pop).collect();
    all.sort_by(rank);
    let mut seen = HashSet::new();
    let (unique, dupes): (Vec<_>, Vec<_>) = all.into_iter().partition(|c| seen.insert(c.priority_list.clone()));
    let mut out: Vec<Candidate<S>> = unique.into_iter().take(n).collect();
    let mut fill = dupes.into_iter();
    while out.len() < n {
        match fill.next() {
            Some(c) => out.push(c),
            None => break,
        }
    }
    out
}
