//! Symbolic simulation of the split-and-cap process.
//!
//! The process works on a forest of realization trees. Phase 1 handles
//! ordinary sums, phase 2 cyclic sums and phase 3 vertex sums. Within a
//! phase an essential sum is cut (both sides are capped, which at this level
//! adds nothing) and an inessential one is contracted into its identity
//! summand. Cut labels accumulate into the final sum labels.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::atoms::identity_type_of_name;
use crate::core2d::{punctured_spherical_is_discal, SphericalType};
use crate::sumtree::{canonicalize, contract_trivial, CanonicalForm, RealizationTree, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("inessential {0} sum is not adjacent to its identity")]
    UncontractibleInessential(SphericalType),
    #[error("phase {phase} left an essential {sum_type} sum behind")]
    PhaseMonotonicity { phase: u8, sum_type: SphericalType },
    #[error("component with {0} summands survived the process")]
    UnsplitComponent(usize),
}

/// Whether a capped side of a cut, described by its canonical form, is the
/// discal 3-orbifold of the puncture type.
pub fn side_caps_to_discal(side: &CanonicalForm, puncture: SphericalType) -> bool {
    match (side.summands.as_slice(), side.labels.is_empty()) {
        ([only], true) => {
            identity_type_of_name(only).is_some_and(|t| punctured_spherical_is_discal(t, puncture))
        }
        _ => false,
    }
}

/// A sum is essential unless one side of its sphere, once the other
/// punctures are capped, is the discal orbifold of the sum's type.
pub fn edge_essential(t: &RealizationTree, index: usize) -> Result<bool, TreeError> {
    t.ensure_valid()?;
    let e = *t.edge(index)?;
    let (near, far) = t.cut(index)?;
    for side in [&near, &far] {
        if side_caps_to_discal(&canonicalize(side)?, e.sum_type) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Essentiality of every sum of the pieces met so far. Clones share the
/// table, so runs on the same realization can reuse each other's work.
#[derive(Debug, Clone, Default)]
pub struct EssentialityCache(Rc<RefCell<HashMap<RealizationTree, Rc<[bool]>>>>);

impl EssentialityCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn edges(&self, piece: &RealizationTree) -> Result<Rc<[bool]>, TreeError> {
        if let Some(v) = self.0.borrow().get(piece) {
            return Ok(v.clone());
        }
        let v = (0..piece.edges().len())
            .map(|i| edge_essential(piece, i))
            .collect::<Result<Rc<[bool]>, _>>()?;
        self.0.borrow_mut().insert(piece.clone(), v.clone());
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitStrategy {
    FirstFit,
    Random { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActionKind {
    Cut,
    ContractTrivial,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SplitStep {
    pub phase: u8,
    pub action: ActionKind,
    pub sum_type: SphericalType,
    /// Labels of the two summands joined by the sum, newer one first.
    pub between: (String, String),
}

impl fmt::Display for SplitStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let action = match self.action {
            ActionKind::Cut => "cut",
            ActionKind::ContractTrivial => "contract",
        };
        write!(
            f,
            "step phase={} action={} type={} between={},{}",
            self.phase, action, self.sum_type, self.between.0, self.between.1
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitTrace {
    pub steps: Vec<SplitStep>,
    pub final_form: CanonicalForm,
}

impl fmt::Display for SplitTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "{s}")?;
        }
        write!(f, "final {}", self.final_form)
    }
}

/// A candidate move: component index, edge index, and whether it is a cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub component: usize,
    pub edge: usize,
    pub essential: bool,
}

/// State of the process: the current pieces and what has been done.
#[derive(Debug, Clone)]
pub struct SplitState {
    pieces: Vec<RealizationTree>,
    steps: Vec<SplitStep>,
    cut_labels: Vec<SphericalType>,
    cache: EssentialityCache,
}

impl SplitState {
    pub fn new(t: &RealizationTree) -> Result<Self, TreeError> {
        Self::with_cache(t, EssentialityCache::new())
    }

    pub fn with_cache(t: &RealizationTree, cache: EssentialityCache) -> Result<Self, TreeError> {
        t.ensure_valid()?;
        Ok(SplitState {
            pieces: vec![t.clone()],
            steps: Vec::new(),
            cut_labels: Vec::new(),
            cache,
        })
    }

    pub fn pieces(&self) -> &[RealizationTree] {
        &self.pieces
    }

    /// Every sum of the given class in the current pieces, with its
    /// essentiality evaluated on the piece that holds it.
    pub fn candidates(&self, class: u8) -> Result<Vec<Candidate>, TreeError> {
        let mut out = Vec::new();
        for (c, piece) in self.pieces.iter().enumerate() {
            if !piece
                .edges()
                .iter()
                .any(|e| e.sum_type.complexity_class() == class)
            {
                continue;
            }
            let essential = self.cache.edges(piece)?;
            for (i, e) in piece.edges().iter().enumerate() {
                if e.sum_type.complexity_class() == class {
                    out.push(Candidate {
                        component: c,
                        edge: i,
                        essential: essential[i],
                    });
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&mut self, phase: u8, c: Candidate) -> Result<(), SplitError> {
        let piece = &self.pieces[c.component];
        let e = *piece.edge(c.edge)?;
        let between = (
            piece.node(e.ends[0].node).label.to_string(),
            piece.node(e.ends[1].node).label.to_string(),
        );
        let action = if c.essential {
            let (near, far) = piece.cut(c.edge)?;
            self.pieces[c.component] = near;
            self.pieces.push(far);
            self.cut_labels.push(e.sum_type);
            ActionKind::Cut
        } else {
            let contracted = contract_trivial(piece, c.edge)
                .map_err(|_| SplitError::UncontractibleInessential(e.sum_type))?;
            self.pieces[c.component] = contracted;
            ActionKind::ContractTrivial
        };
        self.steps.push(SplitStep {
            phase,
            action,
            sum_type: e.sum_type,
            between,
        });
        Ok(())
    }

    /// Checks that no essential sum of a class below `phase` remains.
    fn check_monotone(&self, phase: u8) -> Result<(), SplitError> {
        for class in 0..phase.saturating_sub(1) {
            if let Some(c) = self.candidates(class)?.into_iter().find(|c| c.essential) {
                let e = self.pieces[c.component].edges()[c.edge];
                return Err(SplitError::PhaseMonotonicity {
                    phase,
                    sum_type: e.sum_type,
                });
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Result<SplitTrace, SplitError> {
        let mut summands = Vec::with_capacity(self.pieces.len());
        for piece in &self.pieces {
            if piece.nodes().len() != 1 {
                return Err(SplitError::UnsplitComponent(piece.nodes().len()));
            }
            summands.push(piece.nodes()[0].atom.name().to_string());
        }
        summands.sort();
        let mut labels = self.cut_labels;
        labels.sort();
        Ok(SplitTrace {
            steps: self.steps,
            final_form: CanonicalForm { summands, labels },
        })
    }
}

/// Runs the process, asking `choose` to pick one of the offered candidates
/// whenever the current phase has work left.
pub fn run_split_with<F>(t: &RealizationTree, choose: F) -> Result<SplitTrace, SplitError>
where
    F: FnMut(&[Candidate]) -> usize,
{
    run_split_cached(t, &EssentialityCache::new(), choose)
}

/// As [`run_split_with`], reading and filling a shared cache.
pub fn run_split_cached<F>(
    t: &RealizationTree,
    cache: &EssentialityCache,
    mut choose: F,
) -> Result<SplitTrace, SplitError>
where
    F: FnMut(&[Candidate]) -> usize,
{
    let mut state = SplitState::with_cache(t, cache.clone())?;
    for phase in 1..=3u8 {
        state.check_monotone(phase)?;
        loop {
            let cands = state.candidates(phase - 1)?;
            if cands.is_empty() {
                break;
            }
            let pick = cands[choose(&cands)];
            state.apply(phase, pick)?;
        }
    }
    state.check_monotone(4)?;
    state.finish()
}

/// Runs the process with a fixed strategy. First-fit takes the first
/// candidate in piece and build order; random picks uniformly with a seeded
/// generator, so traces are reproducible.
pub fn run_split(t: &RealizationTree, strategy: SplitStrategy) -> Result<SplitTrace, SplitError> {
    run_split_strategy(t, strategy, &EssentialityCache::new())
}

pub fn run_split_strategy(
    t: &RealizationTree,
    strategy: SplitStrategy,
    cache: &EssentialityCache,
) -> Result<SplitTrace, SplitError> {
    match strategy {
        SplitStrategy::FirstFit => run_split_cached(t, cache, |_| 0),
        SplitStrategy::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            run_split_cached(t, cache, |c| rng.gen_range(0..c.len()))
        }
    }
}

/// Final forms reached by every possible sequence of choices.
pub fn all_split_outcomes(t: &RealizationTree) -> Result<Vec<CanonicalForm>, SplitError> {
    fn explore(
        state: SplitState,
        phase: u8,
        out: &mut Vec<CanonicalForm>,
    ) -> Result<(), SplitError> {
        if phase > 3 {
            let form = state.finish()?.final_form;
            if !out.contains(&form) {
                out.push(form);
            }
            return Ok(());
        }
        let cands = state.candidates(phase - 1)?;
        if cands.is_empty() {
            state.check_monotone(phase + 1)?;
            return explore(state, phase + 1, out);
        }
        for c in cands {
            let mut next = state.clone();
            next.apply(phase, c)?;
            explore(next, phase, out)?;
        }
        Ok(())
    }
    let mut out = Vec::new();
    explore(SplitState::new(t)?, 1, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atoms::builtin_identity;
    use crate::scenarios::{knot_atom, knot_reordering};
    use crate::sumtree::{Attachment, TreeBuilder};
    use std::sync::Arc;

    #[test]
    fn leaf_identity_of_the_sum_type_is_inessential() {
        let c5 = SphericalType::cyclic(5).unwrap();
        let SphericalType::Cyclic(p) = c5 else {
            unreachable!()
        };
        let mut tb = TreeBuilder::new();
        let k = tb.node("k", knot_atom("K", p));
        let s = tb.node("s", Arc::new(builtin_identity(c5)));
        tb.sum(
            s,
            k,
            c5,
            Some(Attachment::component(0)),
            Some(Attachment::component(0)),
        );
        assert_eq!(edge_essential(&tb.build(), 0), Ok(false));
    }

    #[test]
    fn efficient_ordinary_sum_is_essential() {
        let (_, b) = knot_reordering(2, 3);
        assert_eq!(edge_essential(&b, 0), Ok(true));
    }

    #[test]
    fn ordinary_sphere_punctured_cyclically_is_not_discal() {
        let side = CanonicalForm {
            summands: vec!["S3o".into()],
            labels: vec![],
        };
        let c = SphericalType::cyclic(4).unwrap();
        assert!(!side_caps_to_discal(&side, c));
        assert_eq!(
            side_caps_to_discal(&side, c),
            punctured_spherical_is_discal(SphericalType::Ordinary, c)
        );
        assert!(side_caps_to_discal(&side, SphericalType::Ordinary));
    }

    #[test]
    fn knot_example_splits_to_its_canonical_form() {
        let (a, _) = knot_reordering(2, 3);
        let expected = canonicalize(&a).unwrap();
        assert_eq!(
            expected.to_string(),
            "summands: Kp, S3c(3); labels: ordinary"
        );
        for strategy in [
            SplitStrategy::FirstFit,
            SplitStrategy::Random { seed: 0 },
            SplitStrategy::Random { seed: 17 },
        ] {
            let trace = run_split(&a, strategy).unwrap();
            assert_eq!(trace.final_form, expected);
            assert!(trace.steps.len() <= a.edges().len());
        }
        let trace = run_split(&a, SplitStrategy::FirstFit).unwrap();
        assert_eq!(trace.steps[0].action, ActionKind::Cut);
        assert_eq!(trace.steps[0].phase, 1);
        assert_eq!(trace.steps[1].action, ActionKind::ContractTrivial);
        assert_eq!(trace.steps[1].phase, 2);
        assert_eq!(all_split_outcomes(&a).unwrap(), vec![expected]);
    }

    #[test]
    fn single_node_has_empty_trace() {
        let t = RealizationTree::single(
            "x",
            knot_atom("K", crate::core2d::ConeOrder::new(3).unwrap()),
        );
        let trace = run_split(&t, SplitStrategy::FirstFit).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(trace.final_form.summands, vec!["K".to_string()]);
        assert!(trace.final_form.labels.is_empty());
    }

    #[test]
    fn invalid_tree_is_refused() {
        let (a, _) = knot_reordering(2, 3);
        let broken =
            RealizationTree::from_parts(a.nodes().to_vec(), a.edges()[..1].to_vec(), a.root());
        assert!(matches!(
            run_split(&broken, SplitStrategy::FirstFit),
            Err(SplitError::Tree(TreeError::Invalid(_)))
        ));
    }
}
