//! Two-level minimization of guard functions.
//!
//! During compilation every automaton transition group starts as a set of
//! truth assignments over the source state's atom universe. This module
//! shrinks such a set to a small sum of product terms via the classic
//! prime-implicant construction: assignments that no event can realize are
//! passed in as don't-cares, so `{a true, b false}` plus the impossible
//! `{a,b}` and `{}` rows minimizes to the single literal `a`.
//!
//! Selection is fully deterministic. Essential primes are taken first;
//! remaining choices prefer wider coverage, then fewer literals, then more
//! positive literals (so `a` beats `!b` when both would do), and finally
//! the numerically smallest term.

/// A product term over a set of boolean inputs: input `i` is constrained
/// iff bit `i` of `care` is set, to the value of bit `i` in `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Implicant {
    pub care: u32,
    pub value: u32,
}

impl Implicant {
    pub fn covers(&self, minterm: u32) -> bool {
        minterm & self.care == self.value
    }
}

/// Cover all `on` minterms with primes of `on ∪ dont_care`, never touching
/// any minterm outside that union. `bits` may be at most 16.
pub(crate) fn minimize(bits: u32, on: &[u32], dont_care: &[u32]) -> Vec<Implicant> {
    assert!(bits <= 16, "guard universe too large for tabular minimization");
    if on.is_empty() {
        return Vec::new();
    }
    let full: u32 = if bits == 0 { 0 } else { (1 << bits) - 1 };

    let mut level: Vec<Implicant> = on
        .iter()
        .chain(dont_care)
        .map(|&m| Implicant { care: full, value: m & full })
        .collect();
    level.sort();
    level.dedup();

    let mut primes: Vec<Implicant> = Vec::new();
    while !level.is_empty() {
        let mut combined = vec![false; level.len()];
        let mut next: Vec<Implicant> = Vec::new();
        for i in 0..level.len() {
            for j in i + 1..level.len() {
                if level[i].care != level[j].care {
                    continue;
                }
                let diff = level[i].value ^ level[j].value;
                if diff.count_ones() == 1 {
                    combined[i] = true;
                    combined[j] = true;
                    next.push(Implicant {
                        care: level[i].care & !diff,
                        value: level[i].value & !diff,
                    });
                }
            }
        }
        primes.extend(
            level
                .iter()
                .zip(&combined)
                .filter(|(_, c)| !**c)
                .map(|(imp, _)| *imp),
        );
        next.sort();
        next.dedup();
        level = next;
    }
    primes.sort();
    primes.dedup();

    select_cover(on, &primes)
}

/// Cover the `on` minterms without touching the `off` minterms, for
/// universes too wide for the tabular method. Anything in neither set is a
/// don't-care. Each on-minterm is greedily widened by dropping inputs (in
/// index order) while it stays disjoint from `off`; minterms already
/// covered by an earlier cube are skipped. Sound and complete, bounded by
/// `on.len()` cubes, deterministic, but not guaranteed minimal.
pub(crate) fn expand_cover(bits: u32, on: &[u32], off: &[u32]) -> Vec<Implicant> {
    let full: u32 = if bits == 0 { 0 } else { (1 << bits) - 1 };
    let mut cubes: Vec<Implicant> = Vec::new();
    for &m in on {
        if cubes.iter().any(|c| c.covers(m)) {
            continue;
        }
        let mut care = full;
        for bit in 0..bits {
            let probe = care & !(1u32 << bit);
            if off.iter().all(|&o| (o ^ m) & probe != 0) {
                care = probe;
            }
        }
        cubes.push(Implicant { care, value: m & care });
    }
    cubes
}

fn select_cover(on: &[u32], primes: &[Implicant]) -> Vec<Implicant> {
    let mut uncovered: Vec<u32> = on.to_vec();
    uncovered.sort();
    uncovered.dedup();
    let mut chosen: Vec<Implicant> = Vec::new();

    while !uncovered.is_empty() {
        // Essential prime: sole coverer of some still-uncovered minterm.
        let essential = uncovered.iter().find_map(|&m| {
            let mut coverers = primes.iter().filter(|p| p.covers(m));
            match (coverers.next(), coverers.next()) {
                (Some(p), None) => Some(*p),
                _ => None,
            }
        });
        let pick = essential.unwrap_or_else(|| {
            *primes
                .iter()
                .filter(|p| uncovered.iter().any(|&m| p.covers(m)))
                .max_by_key(|p| {
                    let coverage = uncovered.iter().filter(|&&m| p.covers(m)).count();
                    (
                        coverage,
                        std::cmp::Reverse(p.care.count_ones()),
                        p.value.count_ones(),
                        std::cmp::Reverse((p.care, p.value)),
                    )
                })
                .expect("primes cover every on-minterm by construction")
        });
        uncovered.retain(|&m| !pick.covers(m));
        chosen.push(pick);
    }
    chosen.sort();
    chosen.dedup();
    chosen
}
