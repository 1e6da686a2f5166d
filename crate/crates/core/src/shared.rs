//! The replicated common-knowledge structures: share-estimate arrays `C`,
//! transmission lists `D` with main pointers, and underestimation detection.
//!
//! Every node maintains its own copy and the algorithms update all copies in
//! lock-step, so the structures are represented once per execution. The lists
//! keep genuinely per-node bit vectors and per-node pointers so the lock-step
//! invariants stay checkable rather than true by construction.

use crate::error::SharedError;
use crate::model::NodeId;

/// Replicated share estimates: `c[i]` estimates the share of node `i+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareEstimates {
    c: Vec<u64>,
    gamma: u64,
}

impl ShareEstimates {
    pub fn new(nodes: u32) -> Self {
        ShareEstimates {
            c: vec![0; nodes as usize],
            gamma: 0,
        }
    }

    pub fn get(&self, node: NodeId) -> u64 {
        self.c[node.index()]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.c
    }

    /// The estimate of the aggregate burstiness.
    pub fn gamma(&self) -> u64 {
        self.gamma
    }

    pub fn upgrade(&mut self, node: NodeId, amount: u64) -> Result<(), SharedError> {
        if amount == 0 {
            return Err(SharedError::ZeroUpgrade);
        }
        if node.index() >= self.c.len() {
            return Err(SharedError::NodeOutOfRange(node.0));
        }
        self.c[node.index()] += amount;
        self.gamma += amount;
        Ok(())
    }
}

/// The per-node transmission lists `D` and their main pointers.
///
/// Positions are 1-based like the round indices; a pointer of 0 means the
/// lists are still empty and the pointer is undefined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransmissionLists {
    bits: Vec<Vec<bool>>,
    pointers: Vec<usize>,
    ones: Vec<u64>,
}

impl TransmissionLists {
    pub fn new(nodes: u32) -> Self {
        TransmissionLists {
            bits: vec![Vec::new(); nodes as usize],
            pointers: vec![0; nodes as usize],
            ones: vec![0; nodes as usize],
        }
    }

    /// The common list length, the live estimate of the aggregate burstiness.
    pub fn len(&self) -> usize {
        self.bits[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Count of 1-entries in node's list, interpreted as its share estimate.
    pub fn ones(&self, node: NodeId) -> u64 {
        self.ones[node.index()]
    }

    pub fn estimates(&self) -> &[u64] {
        &self.ones
    }

    /// The shared pointer position, if defined.
    pub fn position(&self) -> Option<usize> {
        if self.pointers[0] == 0 {
            None
        } else {
            Some(self.pointers[0])
        }
    }

    /// The node whose current entry is 1, when the lists are nonempty.
    pub fn current_owner(&self) -> Option<NodeId> {
        let pos = self.position()?;
        self.bits
            .iter()
            .position(|list| list[pos - 1])
            .map(NodeId::from_index)
    }

    /// Append `amount` entries for an upgrade by `node`: 1s to its own list
    /// and 0s to every other list. Sets the pointers to the first position
    /// when the very first entry is inserted.
    pub fn apply_upgrade(&mut self, node: NodeId, amount: u64) -> Result<(), SharedError> {
        if amount == 0 {
            return Err(SharedError::ZeroUpgrade);
        }
        if node.index() >= self.bits.len() {
            return Err(SharedError::NodeOutOfRange(node.0));
        }
        let was_empty = self.is_empty();
        for _ in 0..amount {
            for (i, list) in self.bits.iter_mut().enumerate() {
                list.push(i == node.index());
            }
        }
        self.ones[node.index()] += amount;
        if was_empty {
            for p in &mut self.pointers {
                *p = 1;
            }
        }
        Ok(())
    }

    /// Advance every main pointer by one position in the cyclic order.
    pub fn advance(&mut self) -> Result<usize, SharedError> {
        let len = self.len();
        if len == 0 {
            return Err(SharedError::PointerUndefined);
        }
        for p in &mut self.pointers {
            *p = (*p % len) + 1;
        }
        Ok(self.pointers[0])
    }

    /// Verify the lock-step invariants: equal lengths, pointers on the same
    /// position, and exactly one 1 per written position across the nodes.
    pub fn check_invariants(&self) -> Result<(), String> {
        let len = self.bits[0].len();
        if self.bits.iter().any(|l| l.len() != len) {
            return Err("lists have diverging lengths".into());
        }
        let pos = self.pointers[0];
        if self.pointers.iter().any(|p| *p != pos) {
            return Err("main pointers diverged".into());
        }
        if len == 0 && pos != 0 {
            return Err("pointer defined on empty lists".into());
        }
        if len > 0 && !(1..=len).contains(&pos) {
            return Err(format!("pointer {pos} out of range 1..={len}"));
        }
        for j in 0..len {
            let ones = self.bits.iter().filter(|l| l[j]).count();
            if ones != 1 {
                return Err(format!("position {} holds {} ones", j + 1, ones));
            }
        }
        for (i, list) in self.bits.iter().enumerate() {
            let ones = list.iter().filter(|b| **b).count() as u64;
            if ones != self.ones[i] {
                return Err(format!("cached ones for node {} diverged", i + 1));
            }
        }
        Ok(())
    }
}

/// A node's private record of its own injections, with the monotone evidence
/// maximum used for underestimation detection.
///
/// Detection re-evaluates the window length `max(gamma, 1)` each round with
/// the live gamma; `best_k` never decreases so evidence gathered under a
/// smaller gamma is kept.
#[derive(Debug, Clone)]
pub struct InjectionHistory {
    counts: Vec<u32>,
    window_len: usize,
    window_sum: u64,
    best_k: u64,
}

impl InjectionHistory {
    pub fn new() -> Self {
        InjectionHistory {
            counts: Vec::new(),
            window_len: 1,
            window_sum: 0,
            best_k: 0,
        }
    }

    /// Record the injections of the round that just finished.
    pub fn push_round(&mut self, injected: u32) {
        self.counts.push(injected);
        self.window_sum += u64::from(injected);
        if self.counts.len() > self.window_len {
            self.window_sum -= u64::from(self.counts[self.counts.len() - 1 - self.window_len]);
        }
        if self.window_sum > self.best_k {
            self.best_k = self.window_sum;
        }
    }

    fn rescan(&mut self, window_len: usize) {
        self.window_len = window_len;
        let mut sum = 0u64;
        let mut best = self.best_k;
        for (i, c) in self.counts.iter().enumerate() {
            sum += u64::from(*c);
            if i >= window_len {
                sum -= u64::from(self.counts[i - window_len]);
            }
            if sum > best {
                best = sum;
            }
        }
        self.window_sum = sum;
        self.best_k = best;
    }

    /// Maximum injected count seen in any contiguous interval of
    /// `max(gamma, 1)` rounds so far, retained monotonically.
    pub fn best_evidence(&mut self, gamma: u64) -> u64 {
        let window_len = gamma.max(1) as usize;
        if window_len != self.window_len {
            self.rescan(window_len);
        }
        self.best_k
    }

    /// The amount this node currently considers itself underestimated by.
    pub fn deficit(&mut self, gamma: u64, current_estimate: u64) -> u64 {
        self.best_evidence(gamma).saturating_sub(current_estimate)
    }
}

impl Default for InjectionHistory {
    fn default() -> Self {
        Self::new()
    }
}

/// One detector per node, stepped by the engine-facing algorithms.
#[derive(Debug, Clone)]
pub struct Detectors {
    histories: Vec<InjectionHistory>,
}

impl Detectors {
    pub fn new(nodes: u32) -> Self {
        Detectors {
            histories: vec![InjectionHistory::new(); nodes as usize],
        }
    }

    pub fn push_round(&mut self, injected: &[u32]) {
        for (h, c) in self.histories.iter_mut().zip(injected) {
            h.push_round(*c);
        }
    }

    pub fn deficit(&mut self, node: NodeId, gamma: u64, current_estimate: u64) -> u64 {
        self.histories[node.index()].deficit(gamma, current_estimate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn upgrade_appends_one_for_owner_and_zeros_for_rest() {
        let mut lists = TransmissionLists::new(3);
        lists.apply_upgrade(NodeId(2), 1).unwrap();
        assert_eq!(lists.len(), 1);
        assert_eq!(lists.estimates(), &[0, 1, 0]);
        assert_eq!(lists.position(), Some(1));
        assert_eq!(lists.current_owner(), Some(NodeId(2)));
        lists.check_invariants().unwrap();
    }

    #[test]
    fn zero_upgrade_is_rejected() {
        let mut lists = TransmissionLists::new(2);
        assert_eq!(
            lists.apply_upgrade(NodeId(1), 0),
            Err(SharedError::ZeroUpgrade)
        );
        let mut c = ShareEstimates::new(2);
        assert_eq!(c.upgrade(NodeId(1), 0), Err(SharedError::ZeroUpgrade));
    }

    #[test]
    fn multi_upgrade_extends_existing_lists() {
        let mut lists = TransmissionLists::new(2);
        lists.apply_upgrade(NodeId(1), 1).unwrap();
        lists.apply_upgrade(NodeId(1), 2).unwrap();
        assert_eq!(lists.len(), 3);
        assert_eq!(lists.estimates(), &[3, 0]);
        lists.check_invariants().unwrap();
    }

    #[test]
    fn pointer_advances_cyclically() {
        let mut lists = TransmissionLists::new(2);
        assert_eq!(lists.advance(), Err(SharedError::PointerUndefined));
        lists.apply_upgrade(NodeId(1), 1).unwrap();
        lists.apply_upgrade(NodeId(2), 1).unwrap();
        lists.apply_upgrade(NodeId(1), 1).unwrap();
        // three entries, pointer starts at 1
        assert_eq!(lists.advance().unwrap(), 2);
        assert_eq!(lists.advance().unwrap(), 3);
        assert_eq!(lists.advance().unwrap(), 1);
        lists.check_invariants().unwrap();
    }

    #[test]
    fn single_entry_pointer_stays_put() {
        let mut lists = TransmissionLists::new(1);
        lists.apply_upgrade(NodeId(1), 1).unwrap();
        assert_eq!(lists.advance().unwrap(), 1);
        assert_eq!(lists.advance().unwrap(), 1);
    }

    // Brute-force oracle for the maximum window count, independent of the
    // rolling implementation.
    fn brute_best(counts: &[u32], window: usize) -> u64 {
        let mut best = 0;
        for start in 0..counts.len() {
            let end = (start + window).min(counts.len());
            let sum: u64 = counts[start..end].iter().map(|c| u64::from(*c)).sum();
            best = best.max(sum);
        }
        best
    }

    #[test]
    fn detection_with_zero_gamma_uses_one_round_window() {
        let mut h = InjectionHistory::new();
        for round in 1..=5u32 {
            h.push_round(if round == 5 { 1 } else { 0 });
        }
        assert_eq!(h.deficit(0, 0), 1);
    }

    #[test]
    fn detection_covered_estimate_reports_zero() {
        let mut h = InjectionHistory::new();
        for _ in 0..8 {
            h.push_round(1);
        }
        // gamma = 2, at most 2 packets per 2-round window, estimate 2: no deficit.
        assert_eq!(h.deficit(2, 2), 0);
    }

    #[test]
    fn detection_burst_in_gamma_window() {
        let mut h = InjectionHistory::new();
        for round in 1..=13u32 {
            let c = match round {
                10 | 11 => 1,
                13 => 1,
                _ => 0,
            };
            h.push_round(c);
        }
        // gamma = 4: rounds 10..13 hold 3 packets, estimate 1 -> deficit 2.
        assert_eq!(h.deficit(4, 1), 2);
    }

    #[test]
    fn growing_gamma_keeps_earlier_evidence() {
        let mut h = InjectionHistory::new();
        h.push_round(1);
        h.push_round(1);
        h.push_round(1);
        assert_eq!(h.best_evidence(1), 1);
        for _ in 0..100 {
            h.push_round(0);
        }
        // A longer window over the old burst should be found by the rescan.
        assert_eq!(h.best_evidence(3), 3);
        // And it must not be lost when gamma keeps growing.
        assert_eq!(h.best_evidence(8), 3);
    }

    proptest! {
        #[test]
        fn rolling_evidence_matches_brute_force(
            counts in proptest::collection::vec(0u32..4, 1..120),
            gammas in proptest::collection::vec(0u64..12, 1..6),
        ) {
            let mut h = InjectionHistory::new();
            let mut max_gamma_seen = 0u64;
            for c in &counts {
                h.push_round(*c);
            }
            for g in gammas {
                max_gamma_seen = max_gamma_seen.max(g);
                let got = h.best_evidence(g);
                // best_k is monotone over queries, so it must dominate the
                // brute-force answer for the largest window queried so far
                // and be bounded by it.
                let expect = brute_best(&counts, max_gamma_seen.max(1) as usize);
                prop_assert_eq!(got, expect);
            }
        }

        #[test]
        fn upgrades_preserve_list_invariants(
            ops in proptest::collection::vec((1u32..6, 1u64..4), 1..30)
        ) {
            let mut lists = TransmissionLists::new(6);
            for (node, amount) in ops {
                lists.apply_upgrade(NodeId(node), amount).unwrap();
                lists.check_invariants().unwrap();
                if !lists.is_empty() {
                    lists.advance().unwrap();
                    lists.check_invariants().unwrap();
                }
            }
        }
    }
}
