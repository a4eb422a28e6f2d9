use std::collections::HashMap;
use std::sync::RwLock;

use super::{FracIdeal, QuadField, Splitting};
use crate::arith;
use crate::error::{Error, Result};

/// Largest prime norm searched when collecting class representatives.
pub const REP_SEARCH_BOUND: i64 = 10_000;

/// The narrow class group, given by representatives coprime to 𝔡.
#[derive(Debug)]
pub struct NarrowClassGroup {
    pub field: QuadField,
    /// reps[0] is the unit ideal.
    pub reps: Vec<FracIdeal>,
    pub mult: Vec<Vec<usize>>,
    pub inverse: Vec<usize>,
    cache: RwLock<HashMap<FracIdeal, usize>>,
}

impl NarrowClassGroup {
    pub fn new(field: &QuadField) -> Result<Self> {
        let delta = field.delta();
        let target = field.narrow_class_number;
        let mut reps = vec![field.unit_ideal()];
        'outer: for p in arith::primes_up_to(REP_SEARCH_BOUND) {
            if reps.len() == target {
                break;
            }
            if delta % p == 0 || field.splitting(p) != Splitting::Split {
                continue;
            }
            for q in field.primes_above(p) {
                if !reps.iter().any(|r| field.narrowly_equivalent(r, &q)) {
                    reps.push(q);
                    if reps.len() == target {
                        break 'outer;
                    }
                }
            }
        }
        if reps.len() != target {
            return Err(Error::SearchExhausted(format!(
                "found {} of {} narrow classes among primes of norm ≤ {REP_SEARCH_BOUND}",
                reps.len(),
                target
            )));
        }
        Ok(Self::with_reps(field, reps))
    }

    /// Builds the group from a caller-supplied complete set of representatives.
    pub fn with_reps(field: &QuadField, reps: Vec<FracIdeal>) -> Self {
        let mut g = NarrowClassGroup {
            field: field.clone(),
            reps,
            mult: Vec::new(),
            inverse: Vec::new(),
            cache: RwLock::new(HashMap::new()),
        };
        let n = g.reps.len();
        let mut mult = vec![vec![0; n]; n];
        for i in 0..n {
            for j in i..n {
                let k = g.class_of(&g.reps[i].mul(&g.reps[j]));
                mult[i][j] = k;
                mult[j][i] = k;
            }
        }
        g.inverse = (0..n).map(|i| g.class_of(&g.reps[i].conj())).collect();
        g.mult = mult;
        g
    }

    pub fn order(&self) -> usize {
        self.reps.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    /// Index of the representative narrowly equivalent to I.
    pub fn class_of(&self, i: &FracIdeal) -> usize {
        if let Some(&k) = self.cache.read().unwrap().get(i) {
            return k;
        }
        let k = self
            .reps
            .iter()
            .position(|r| self.field.narrowly_equivalent(i, r))
            .expect("representatives must cover every narrow class");
        self.cache.write().unwrap().insert(i.clone(), k);
        k
    }

    pub fn pow(&self, c: usize, e: u64) -> usize {
        (0..e).fold(0, |acc, _| self.mult[acc][c])
    }
}
