//! Exact min-cost assignment over rationals extended with infinity,
//! by the potential-based shortest augmenting path method. Infinite entries
//! mark forbidden pairs; when no finite perfect matching exists the result
//! is [`MinCostResult::Infeasible`].

use num_rational::BigRational;
use num_traits::Zero;

use crate::rational::ExtRational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MinCostResult {
    Finite {
        total: BigRational,
        /// `column_of_row[i]` is the column matched to row i.
        column_of_row: Vec<usize>,
    },
    Infeasible,
}

impl MinCostResult {
    pub fn total(&self) -> ExtRational {
        match self {
            MinCostResult::Finite { total, .. } => ExtRational::Finite(total.clone()),
            MinCostResult::Infeasible => ExtRational::Infinity,
        }
    }
}

/// Minimum over perfect matchings of the total cost. `cost` must be square.
pub fn min_cost_assignment(cost: &[Vec<ExtRational>]) -> MinCostResult {
    let n = cost.len();
    assert!(cost.iter().all(|row| row.len() == n), "cost matrix must be square");
    if n == 0 {
        return MinCostResult::Finite {
            total: BigRational::zero(),
            column_of_row: Vec::new(),
        };
    }
    // 1-based arrays with a virtual column 0; row_potential/col_potential are
    // the dual variables, matched_row[j] the row assigned to column j.
    let mut row_potential = vec![BigRational::zero(); n + 1];
    let mut col_potential = vec![BigRational::zero(); n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut predecessor = vec![0usize; n + 1];

    for row in 1..=n {
        matched_row[0] = row;
        let mut j0 = 0usize;
        let mut min_value = vec![ExtRational::Infinity; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = ExtRational::Infinity;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = &(&cost[i0 - 1][j - 1] - &row_potential[i0]) - &col_potential[j];
                if reduced < min_value[j] {
                    min_value[j] = reduced;
                    predecessor[j] = j0;
                }
                if min_value[j] < delta {
                    delta = min_value[j].clone();
                    j1 = j;
                }
            }
            let delta = match delta {
                ExtRational::Finite(value) => value,
                // every unreached column is behind an infinite edge
                ExtRational::Infinity => return MinCostResult::Infeasible,
            };
            for j in 0..=n {
                if used[j] {
                    row_potential[matched_row[j]] += &delta;
                    col_potential[j] -= &delta;
                } else {
                    min_value[j] = &min_value[j] - &delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        // augment along the alternating path
        while j0 != 0 {
            let j1 = predecessor[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
        }
    }

    let mut column_of_row = vec![0usize; n];
    let mut total = BigRational::zero();
    for j in 1..=n {
        let row = matched_row[j];
        column_of_row[row - 1] = j - 1;
        match &cost[row - 1][j - 1] {
            ExtRational::Finite(value) => total += value,
            ExtRational::Infinity => unreachable!("matched edges are finite"),
        }
    }
    MinCostResult::Finite {
        total,
        column_of_row,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};

    fn fin(v: i64) -> ExtRational {
        ExtRational::from_int(v)
    }

    fn brute_force(cost: &[Vec<ExtRational>]) -> ExtRational {
        let n = cost.len();
        (0..n)
            .permutations(n)
            .map(|perm| {
                perm.iter()
                    .enumerate()
                    .fold(fin(0), |acc, (i, &j)| &acc + &cost[i][j])
            })
            .min()
            .unwrap_or(fin(0))
    }

    #[test]
    fn simple_cases() {
        let zero3 = vec![vec![fin(0); 3]; 3];
        assert_eq!(min_cost_assignment(&zero3).total(), fin(0));

        let diagonal = vec![
            vec![fin(-1), ExtRational::Infinity, ExtRational::Infinity],
            vec![ExtRational::Infinity, fin(-2), ExtRational::Infinity],
            vec![ExtRational::Infinity, ExtRational::Infinity, fin(-3)],
        ];
        assert_eq!(min_cost_assignment(&diagonal).total(), fin(-6));

        let infeasible = vec![
            vec![ExtRational::Infinity, ExtRational::Infinity],
            vec![fin(1), fin(2)],
        ];
        assert_eq!(min_cost_assignment(&infeasible), MinCostResult::Infeasible);
    }

    #[test]
    fn anti_diagonal_choice() {
        let cost = vec![vec![fin(3), fin(1)], vec![fin(1), fin(3)]];
        match min_cost_assignment(&cost) {
            MinCostResult::Finite { total, column_of_row } => {
                assert_eq!(total, BigRational::from_integer(BigInt::from(2)));
                assert_eq!(column_of_row, vec![1, 0]);
            }
            MinCostResult::Infeasible => panic!("feasible instance"),
        }
    }

    #[test]
    fn matches_brute_force_on_random_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(321);
        for trial in 0..60 {
            let n = rng.gen_range(1..=6);
            let cost: Vec<Vec<ExtRational>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            if rng.gen_bool(0.2) {
                                ExtRational::Infinity
                            } else {
                                ExtRational::Finite(BigRational::new(
                                    BigInt::from(rng.gen_range(-20i64..=20)),
                                    BigInt::from(rng.gen_range(1i64..=4)),
                                ))
                            }
                        })
                        .collect()
                })
                .collect();
            assert_eq!(
                min_cost_assignment(&cost).total(),
                brute_force(&cost),
                "trial {trial}: {cost:?}"
            );
        }
    }
}
