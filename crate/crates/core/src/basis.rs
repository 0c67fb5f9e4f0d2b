//! Finite occupation bases: a fixed particle-number sector or every state up
//! to a particle cap.

use std::collections::HashMap;

use crate::error::{QSpaceError, Result};
use crate::fock::{FockSpace, OccupationState, Statistics};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selector {
    /// Every state with `total_n <= n_max`.
    UpTo(u32),
    /// Every state with `total_n == n`.
    Sector(u32),
}

#[derive(Clone, Debug)]
pub struct TruncatedBasis {
    space: FockSpace,
    selector: Selector,
    states: Vec<OccupationState>,
    index: HashMap<OccupationState, usize>,
}

impl TruncatedBasis {
    pub fn new(space: FockSpace, selector: Selector) -> Result<Self> {
        let (lo, hi) = match selector {
            Selector::UpTo(n) => (0, n),
            Selector::Sector(n) => (n, n),
        };
        let max_per_mode = match space.stats {
            Statistics::Boson => u32::MAX,
            Statistics::Fermion => 1,
        };
        let mut dense = Vec::new();
        let mut current = vec![0u32; space.modes];
        enumerate(&mut current, 0, hi, max_per_mode, &mut |occ| {
            let n: u32 = occ.iter().sum();
            if n >= lo {
                dense.push(occ.to_vec());
            }
        });
        dense.sort();
        let states = dense
            .iter()
            .map(|d| space.state_from_dense(d))
            .collect::<Result<Vec<_>>>()?;
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(TruncatedBasis {
            space,
            selector,
            states,
            index,
        })
    }

    pub fn sector(space: FockSpace, n: u32) -> Result<Self> {
        Self::new(space, Selector::Sector(n))
    }

    pub fn up_to(space: FockSpace, n_max: u32) -> Result<Self> {
        Self::new(space, Selector::UpTo(n_max))
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn selector(&self) -> Selector {
        self.selector
    }

    /// Largest particle number any state of this basis may carry.
    pub fn particle_cap(&self) -> u32 {
        match self.selector {
            Selector::UpTo(n) | Selector::Sector(n) => n,
        }
    }

    pub fn states(&self) -> &[OccupationState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, state: &OccupationState) -> Option<usize> {
        self.index.get(state).copied()
    }

    pub fn state(&self, i: usize) -> Result<&OccupationState> {
        self.states.get(i).ok_or(QSpaceError::DimensionMismatch {
            expected: self.states.len(),
            found: i,
        })
    }
}

fn enumerate(
    current: &mut [u32],
    pos: usize,
    remaining: u32,
    max_per_mode: u32,
    emit: &mut dyn FnMut(&[u32]),
) {
    if pos == current.len() {
        emit(current);
        return;
    }
    for n in 0..=remaining.min(max_per_mode) {
        current[pos] = n;
        enumerate(current, pos + 1, remaining - n, max_per_mode, emit);
    }
    current[pos] = 0;
}
