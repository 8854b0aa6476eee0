//! Quine-McCluskey prime-implicant generation with exact branch-and-bound
//! cover selection (greedy fallback above 64 primes).

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::logicsynth::cover::{verify_equivalence, SopCover};
use crate::mulcore::{CubePattern, TruthTable};

/// Minimization is limited to 12 inputs.
pub const MINIMIZE_CAP_INPUTS: u32 = 12;

/// Minimize one output column of a truth table into a sum-of-products cover.
///
/// The result is verified against the column before it is returned.
pub fn minimize(table: &TruthTable, output_index: u32) -> Result<SopCover> {
    let n = table.num_inputs();
    if n > MINIMIZE_CAP_INPUTS {
        return Err(Error::WidthCap { bits: n, cap: MINIMIZE_CAP_INPUTS });
    }
    let minterms = table.minterms(output_index);
    let cubes = if minterms.is_empty() {
        vec![]
    } else if minterms.len() == table.entries.len() {
        vec![CubePattern { mask: 0, value: 0 }]
    } else {
        let primes = prime_implicants(n, &minterms);
        select_cover(&minterms, &primes)
    };
    let cover = SopCover { num_inputs: n, output_index, cubes };
    let check = verify_equivalence(&cover, table, output_index);
    if !check.equivalent {
        return Err(Error::Inconsistent(format!(
            "minimized cover for output {output_index} differs from the table at input {}",
            check.counterexample.unwrap_or(0)
        )));
    }
    Ok(cover)
}

/// All prime implicants of the function given by its minterms.
pub fn prime_implicants(num_inputs: u32, minterms: &[u32]) -> Vec<CubePattern> {
    let full = if num_inputs == 32 { u32::MAX } else { (1u32 << num_inputs) - 1 };
    let mut current: BTreeSet<CubePattern> =
        minterms.iter().map(|&m| CubePattern { mask: full, value: m }).collect();
    let mut primes: BTreeSet<CubePattern> = BTreeSet::new();

    while !current.is_empty() {
        // Group by (mask, popcount) so only adjacent groups are compared.
        let mut groups: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
        for c in &current {
            groups.entry((c.mask, c.value.count_ones())).or_default().push(c.value);
        }
        let mut combined: BTreeSet<CubePattern> = BTreeSet::new();
        let mut next: BTreeSet<CubePattern> = BTreeSet::new();
        for (&(mask, ones), values) in &groups {
            let Some(upper) = groups.get(&(mask, ones + 1)) else { continue };
            for &v0 in values {
                for &v1 in upper {
                    let diff = v0 ^ v1;
                    if diff.count_ones() == 1 {
                        next.insert(CubePattern { mask: mask & !diff, value: v0 & !diff });
                        combined.insert(CubePattern { mask, value: v0 });
                        combined.insert(CubePattern { mask, value: v1 });
                    }
                }
            }
        }
        for c in current {
            if !combined.contains(&c) {
                primes.insert(c);
            }
        }
        current = next;
    }
    primes.into_iter().collect()
}

type Bitset = Vec<u64>;

fn bitset_new(len: usize) -> Bitset {
    vec![0; len.div_ceil(64)]
}

fn bitset_set(bs: &mut Bitset, i: usize) {
    bs[i / 64] |= 1 << (i % 64);
}

fn bitset_get(bs: &Bitset, i: usize) -> bool {
    bs[i / 64] >> (i % 64) & 1 == 1
}

fn bitset_or(dst: &mut Bitset, src: &Bitset) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d |= s;
    }
}

fn bitset_count_new(candidate: &Bitset, covered: &Bitset) -> u32 {
    candidate.iter().zip(covered).map(|(c, v)| (c & !v).count_ones()).sum()
}

fn all_covered(covered: &Bitset, total: usize) -> bool {
    covered.iter().map(|b| b.count_ones() as usize).sum::<usize>() == total
}

/// Select a covering subset of the primes: essential primes first, then an
/// exact branch-and-bound when at most 64 primes exist, greedy otherwise.
/// Minimizes cube count, then literal count.
fn select_cover(minterms: &[u32], primes: &[CubePattern]) -> Vec<CubePattern> {
    let nm = minterms.len();
    let coverage: Vec<Bitset> = primes
        .iter()
        .map(|p| {
            let mut bs = bitset_new(nm);
            for (i, &m) in minterms.iter().enumerate() {
                if p.covers(m) {
                    bitset_set(&mut bs, i);
                }
            }
            bs
        })
        .collect();

    let mut chosen: Vec<usize> = Vec::new();
    let mut covered = bitset_new(nm);

    // Essential primes: sole cover of some minterm.
    loop {
        let mut found = false;
        for i in 0..nm {
            if bitset_get(&covered, i) {
                continue;
            }
            let covering: Vec<usize> =
                (0..primes.len()).filter(|&p| bitset_get(&coverage[p], i)).collect();
            if covering.len() == 1 && !chosen.contains(&covering[0]) {
                chosen.push(covering[0]);
                bitset_or(&mut covered, &coverage[covering[0]]);
                found = true;
            }
        }
        if !found {
            break;
        }
    }

    if !all_covered(&covered, nm) {
        if primes.len() <= 64 {
            let extra = branch_and_bound(primes, &coverage, &covered, nm, &chosen);
            chosen.extend(extra);
        } else {
            while !all_covered(&covered, nm) {
                let best = (0..primes.len())
                    .filter(|p| !chosen.contains(p))
                    .max_by(|&x, &y| {
                        bitset_count_new(&coverage[x], &covered)
                            .cmp(&bitset_count_new(&coverage[y], &covered))
                            .then(primes[y].literal_count().cmp(&primes[x].literal_count()))
                            .then(primes[y].cmp(&primes[x]))
                    })
                    .expect("primes cover all minterms");
                chosen.push(best);
                bitset_or(&mut covered, &coverage[best]);
            }
        }
    }

    let mut cubes: Vec<CubePattern> = chosen.into_iter().map(|i| primes[i]).collect();
    cubes.sort();
    cubes
}

/// Exact minimum-cube cover of the remaining minterms by depth-first search,
/// branching on the hardest uncovered minterm.
fn branch_and_bound(
    primes: &[CubePattern],
    coverage: &[Bitset],
    covered: &Bitset,
    nm: usize,
    chosen: &[usize],
) -> Vec<usize> {
    struct Search<'a> {
        primes: &'a [CubePattern],
        coverage: &'a [Bitset],
        nm: usize,
        best: Option<(usize, u32, Vec<usize>)>, // (cubes, literals, picks)
    }

    impl Search<'_> {
        fn literals(&self, picks: &[usize]) -> u32 {
            picks.iter().map(|&p| self.primes[p].literal_count()).sum()
        }

        fn run(&mut self, covered: &Bitset, picks: &mut Vec<usize>) {
            if let Some((best_cubes, best_lits, _)) = &self.best {
                if picks.len() > *best_cubes
                    || (picks.len() == *best_cubes && self.literals(picks) >= *best_lits)
                {
                    return;
                }
            }
            if all_covered(covered, self.nm) {
                let lits = self.literals(picks);
                let better = match &self.best {
                    None => true,
                    Some((c, l, _)) => picks.len() < *c || (picks.len() == *c && lits < *l),
                };
                if better {
                    self.best = Some((picks.len(), lits, picks.clone()));
                }
                return;
            }
            if let Some((best_cubes, _, _)) = &self.best {
                if picks.len() + 1 > *best_cubes {
                    return;
                }
            }
            // Branch on the uncovered minterm with the fewest candidates.
            let target = (0..self.nm)
                .filter(|&i| !bitset_get(covered, i))
                .min_by_key(|&i| {
                    (0..self.primes.len())
                        .filter(|&p| bitset_get(&self.coverage[p], i))
                        .count()
                })
                .expect("some minterm uncovered");
            let candidates: Vec<usize> = (0..self.primes.len())
                .filter(|&p| bitset_get(&self.coverage[p], target) && !picks.contains(&p))
                .collect();
            for p in candidates {
                let mut next = covered.clone();
                bitset_or(&mut next, &self.coverage[p]);
                picks.push(p);
                self.run(&next, picks);
                picks.pop();
            }
        }
    }

    let mut search = Search { primes, coverage, nm, best: None };
    let mut picks: Vec<usize> = chosen.to_vec();
    let base = picks.len();
    search.run(covered, &mut picks);
    let (_, _, best) = search.best.expect("primes cover all minterms");
    best[base..].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mulcore::{enumerate_table, ExactModel, Mul3x3_1};
    use crate::rng::SplitMix64;

    #[test]
    fn exact_o0_is_a_single_two_literal_cube() {
        let table = enumerate_table(&ExactModel::new(3)).unwrap();
        let cover = minimize(&table, 0).unwrap();
        assert_eq!(cover.cubes.len(), 1);
        assert_eq!(cover.cubes[0].to_pattern(6), "--1--1"); // a0 & b0
    }

    #[test]
    fn approx_top_bit_is_constant_zero() {
        // The approximate design's table is 5 bits wide; a 6-bit view of it
        // has a constant-0 top column (empty cover).
        let t5 = enumerate_table(&Mul3x3_1).unwrap();
        let t6 = TruthTable::new(3, 3, 6, t5.entries.clone()).unwrap();
        let cover = minimize(&t6, 5).unwrap();
        assert_eq!(cover.is_constant(), Some(false));
        assert!(cover.cubes.is_empty());
    }

    #[test]
    fn constant_one_column() {
        let table = TruthTable::new(1, 1, 1, vec![1, 1, 1, 1]).unwrap();
        let cover = minimize(&table, 0).unwrap();
        assert_eq!(cover.is_constant(), Some(true));
        assert_eq!(cover.cubes.len(), 1);
        assert_eq!(cover.cubes[0].literal_count(), 0);
    }

    #[test]
    fn two_variable_xor() {
        // XOR has no merging primes: two cubes of two literals each.
        let table = TruthTable::new(1, 1, 1, vec![0, 1, 1, 0]).unwrap();
        let cover = minimize(&table, 0).unwrap();
        assert_eq!(cover.cubes.len(), 2);
        assert_eq!(cover.cubes.iter().map(|c| c.literal_count()).sum::<u32>(), 4);
    }

    #[test]
    fn sound_on_random_functions() {
        let mut rng = SplitMix64::new(2024);
        for _ in 0..60 {
            let bits = 2 + (rng.next_u64() % 4) as u32; // 2..=5 inputs
            let (wa, wb) = (bits / 2, bits - bits / 2);
            let entries: Vec<u32> =
                (0..1u32 << bits).map(|_| (rng.next_u64() & 1) as u32).collect();
            let table = TruthTable::new(wa, wb, 1, entries).unwrap();
            let cover = minimize(&table, 0).unwrap();
            assert!(verify_equivalence(&cover, &table, 0).equivalent);
        }
    }

    #[test]
    fn idempotent_at_the_function_level() {
        let table = enumerate_table(&Mul3x3_1).unwrap();
        for bit in 0..table.out_width {
            let cover = minimize(&table, bit).unwrap();
            let realized: Vec<u32> =
                (0..64u32).map(|i| cover.eval(i) as u32).collect();
            let round = TruthTable::new(3, 3, 1, realized).unwrap();
            let again = minimize(&round, 0).unwrap();
            assert!(verify_equivalence(&again, &table, bit).equivalent);
            assert_eq!(again.cubes.len(), cover.cubes.len());
        }
    }

    #[test]
    fn cap_enforced() {
        let table = TruthTable::new(7, 6, 1, vec![0; 1 << 13]).unwrap();
        assert!(matches!(minimize(&table, 0), Err(Error::WidthCap { .. })));
    }
}
