//! Property suites over generated instances. Each suite returns a
//! [`SuiteReport`] with the number of instances checked and the failures.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::ops::RangeInclusive;
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::core2d::{
    classify_two_orbifold, is_admissible_vertex_triple, Classification, ConeOrder, TwoOrbifold,
};
use crate::enumerate::{
    all_build_orders, for_each_realization, forests, free_trees, random_realization, Alphabet,
};
use crate::nu::{
    alpha_sum, alpha_values, beta_sum, blow_up, euler_check, nu, replay_count, CyclicityGraph,
    NuError, PlainGraph, TpKind,
};
use crate::scenarios::vertex_sum_reordering;
use crate::splitproc::{run_split_strategy, EssentialityCache, SplitStrategy};
use crate::sumtree::{
    canonicalize, contract_trivial, slide, trivial_endpoint, CanonicalForm, RealizationTree,
};

/// Failures beyond this many are counted but not described.
const MAX_EXAMPLES: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub instances: u64,
    pub failures: u64,
    /// Individual assertions evaluated.
    pub checks: u64,
    /// Extra counts describing the instances, printed as `key=value`.
    pub tallies: Vec<(&'static str, u64)>,
    pub examples: Vec<String>,
    /// False when a time budget stopped the suite before it covered its
    /// whole instance family.
    pub complete: bool,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport {
            name,
            instances: 0,
            failures: 0,
            checks: 0,
            tallies: Vec::new(),
            examples: Vec::new(),
            complete: true,
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.examples.len() < MAX_EXAMPLES {
                self.examples.push(describe());
            }
        }
    }

    fn tally(&mut self, key: &'static str, by: u64) {
        match self.tallies.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => *v += by,
            None => self.tallies.push((key, by)),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.complete
    }
}

/// `suite NAME instances=N failures=K checks=C [incomplete]`, then one line
/// per recorded failure.
impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "suite {} instances={} failures={} checks={}",
            self.name, self.instances, self.failures, self.checks
        )?;
        for (k, v) in &self.tallies {
            write!(f, " {k}={v}")?;
        }
        if !self.complete {
            write!(f, " incomplete")?;
        }
        for e in &self.examples {
            write!(f, "\n  failure {e}")?;
        }
        Ok(())
    }
}

/// One-line description of a realization: nodes, then sums in build order.
pub fn summary(t: &RealizationTree) -> String {
    let nodes = t
        .nodes()
        .iter()
        .map(|n| format!("{}={}", n.label, n.atom.name()))
        .join(" ");
    let edges = t
        .edges()
        .iter()
        .map(|e| {
            let end = |k: usize| {
                let s = e.ends[k];
                let mut out = t.node(s.node).label.to_string();
                if let Some(a) = s.attachment {
                    out.push_str(&format!(".{}", a.component));
                    if let Some(v) = a.vertex {
                        out.push_str(&format!(".v{v}"));
                    }
                }
                out
            };
            format!("{}->{}:{}", end(0), end(1), e.sum_type)
        })
        .join(" ");
    format!("[{nodes} | {edges}]")
}

fn order(p: u32) -> ConeOrder {
    ConeOrder::new(p).expect("order >= 2")
}

/// Multisets of `k` orders in `2..=max`.
fn order_multisets(k: usize, max: u32) -> Vec<Vec<ConeOrder>> {
    (2..=max)
        .combinations_with_replacement(k)
        .map(|v| v.into_iter().map(order).collect())
        .collect()
}

/// Classification of every closed orientable 2-orbifold in the range against
/// the closed-form description of bad and spherical ones.
pub fn classifier_suite(max_genus: u32, max_points: usize, max_order: u32) -> SuiteReport {
    let mut r = SuiteReport::new("classify");
    for genus in 0..=max_genus {
        for k in 0..=max_points {
            for orders in order_multisets(k, max_order) {
                r.instances += 1;
                let raw: Vec<u32> = orders.iter().map(|o| o.get()).collect();
                let expect_bad =
                    genus == 0 && (raw.len() == 1 || (raw.len() == 2 && raw[0] != raw[1]));
                let expect_spherical = genus == 0
                    && (raw.is_empty()
                        || (raw.len() == 2 && raw[0] == raw[1])
                        || (raw.len() == 3
                            && is_admissible_vertex_triple(orders[0], orders[1], orders[2])));
                let o = TwoOrbifold::from_raw(genus, &raw).expect("orders >= 2");
                let chi = o.euler_characteristic();
                // χ > 0 must not occur outside the two lists above.
                let stray_positive =
                    chi > Ratio::from_integer(0) && !expect_bad && !expect_spherical;
                r.check(!stray_positive, || {
                    format!("genus={genus} orders={raw:?} chi={chi} positive")
                });
                if stray_positive {
                    continue;
                }
                let c = classify_two_orbifold(&o);
                let ok = match c {
                    Classification::Bad => expect_bad,
                    Classification::Spherical(_) => expect_spherical,
                    Classification::Euclidean | Classification::Hyperbolic => {
                        !expect_bad && !expect_spherical
                    }
                };
                r.check(ok, || format!("genus={genus} orders={raw:?} got {c}"));
            }
        }
    }
    r
}

fn leaves_of(g: &PlainGraph) -> Vec<bool> {
    g.leaves()
}

/// β sums and the Euler characteristic record for every tree with
/// `1..=max_edges` edges, external set its leaves, and every ordering.
pub fn tree_lemma_suite(max_edges: usize) -> SuiteReport {
    let mut r = SuiteReport::new("tree-lemma");
    for n in 2..=max_edges + 1 {
        for tree in free_trees(n) {
            let external = leaves_of(&tree);
            let e_count = external.iter().filter(|&&x| x).count();
            for order in (0..tree.edges.len()).permutations(tree.edges.len()) {
                r.instances += 1;
                let beta = beta_sum(&tree, &external, &order).expect("a tree");
                r.check(beta == e_count - 1, || {
                    format!(
                        "tree={:?} order={order:?} beta={beta} #E={e_count}",
                        tree.edges
                    )
                });
                let rec = euler_check(&tree, &external, &order).expect("a tree");
                let ok = rec.chi_start == 0
                    && rec.chi_end == 1 - e_count as i64
                    && rec.beta_total == e_count - 1
                    && rec.stepwise;
                r.check(ok, || {
                    format!("tree={:?} order={order:?} {rec:?}", tree.edges)
                });
            }
        }
    }
    r
}

/// Every `C`/`N` colouring of a forest.
fn colourings(g: &PlainGraph) -> impl Iterator<Item = Vec<TpKind>> + '_ {
    (0u32..1 << g.node_count).map(move |mask| {
        (0..g.node_count)
            .map(|i| {
                if mask >> i & 1 == 1 {
                    TpKind::NonCyclic
                } else {
                    TpKind::Cyclic
                }
            })
            .collect()
    })
}

/// α invariance, blow-up invariance and the external-`C` reduction step over
/// every coloured forest with `1..=max_edges` edges and every ordering.
pub fn alpha_suite(max_edges: usize) -> SuiteReport {
    let mut r = SuiteReport::new("alpha");
    for forest in forests(max_edges) {
        let m = forest.edges.len();
        let orders: Vec<Vec<usize>> = (0..m).permutations(m).collect();
        let valence = forest.degrees();
        for kinds in colourings(&forest) {
            r.instances += 1;
            let g = CyclicityGraph::from_kinds(&kinds, forest.edges.clone()).expect("a forest");
            let sums: BTreeSet<usize> = orders.iter().map(|o| alpha_sum(&g, o)).collect();
            r.check(sums.len() == 1, || {
                format!("forest={:?} kinds={kinds:?} sums={sums:?}", forest.edges)
            });
            let base = *sums.iter().next().expect("at least one ordering");

            for n in 0..kinds.len() {
                if kinds[n] != TpKind::NonCyclic || valence[n] < 2 {
                    continue;
                }
                let b = blow_up(&g, n).expect("blowable");
                let ok = orders.iter().all(|o| alpha_sum(&b, o) == base);
                r.check(ok, || {
                    format!("forest={:?} kinds={kinds:?} blow_up({n})", forest.edges)
                });
            }

            // An edge with a valence-one `C` end scores 1 wherever it is, and
            // removing it leaves the other scores as they were.
            for (i, &(a, b)) in forest.edges.iter().enumerate() {
                let ext_c = |v: usize| kinds[v] == TpKind::Cyclic && valence[v] == 1;
                if !ext_c(a) && !ext_c(b) {
                    continue;
                }
                let mut rest = forest.edges.clone();
                rest.remove(i);
                let h = CyclicityGraph::from_kinds(&kinds, rest).expect("a forest");
                let ok = orders.iter().all(|o| {
                    let full = alpha_values(&g, o);
                    let pos = o.iter().position(|&k| k == i).expect("permutation");
                    let reduced: Vec<usize> = o
                        .iter()
                        .filter(|&&k| k != i)
                        .map(|&k| if k > i { k - 1 } else { k })
                        .collect();
                    let mut expect = full.clone();
                    expect.remove(pos);
                    full[pos] == 1 && alpha_values(&h, &reduced) == expect
                });
                r.check(ok, || {
                    format!(
                        "forest={:?} kinds={kinds:?} external edge {i}",
                        forest.edges
                    )
                });
            }
        }
    }
    r
}

/// A key for a realization that ignores build order and root.
fn move_key(t: &RealizationTree) -> String {
    let mut nodes: Vec<String> = t
        .nodes()
        .iter()
        .map(|n| format!("{}={}", n.label, n.atom.name()))
        .collect();
    nodes.sort();
    let mut edges: Vec<String> = t
        .edges()
        .iter()
        .map(|e| {
            let mut ends: Vec<String> = e
                .ends
                .iter()
                .map(|s| format!("{}{:?}", t.node(s.node).label, s.attachment))
                .collect();
            ends.sort();
            format!("{}:{}", ends.join("~"), e.sum_type)
        })
        .collect();
    edges.sort();
    format!("{}|{}", nodes.join(","), edges.join(","))
}

/// Realizations reachable from `t` by slides and trivial contractions.
pub fn move_closure(t: &RealizationTree) -> Vec<RealizationTree> {
    let mut seen = HashSet::from([move_key(t)]);
    let mut queue = VecDeque::from([t.clone()]);
    let mut out = Vec::new();
    while let Some(s) = queue.pop_front() {
        let mut next = Vec::new();
        for (i, e) in s.edges().iter().enumerate() {
            for end in e.ends {
                for j in 0..s.edges().len() {
                    if let Ok(u) = slide(&s, i, end.node, j) {
                        next.push(u);
                    }
                }
            }
            if trivial_endpoint(&s, i).is_some() {
                next.push(contract_trivial(&s, i).expect("trivial edge contracts"));
            }
        }
        for u in next {
            if seen.insert(move_key(&u)) {
                queue.push_back(u);
            }
        }
        out.push(s);
    }
    out
}

/// ν over random efficient realizations without vertex sums: the same
/// across build orders and across move-equivalent realizations (for at most
/// `closure_nodes` nodes), with both computations agreeing.
pub fn nu_suite(seed: u64, instances: u64, max_edges: usize, closure_nodes: usize) -> SuiteReport {
    let mut r = SuiteReport::new("nu");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..instances {
        let p = rng.gen_range(2..=5);
        let alphabet = Alphabet::cyclic(p);
        let edges = rng.gen_range(0..=max_edges);
        let t = crate::sumtree::reduce(&random_realization(&mut rng, &alphabet, edges, false))
            .expect("generated realizations are valid");
        r.instances += 1;
        let p = order(p);
        r.tally("edges", t.edges().len() as u64);
        let cyclic_sums = t
            .edges()
            .iter()
            .filter(|e| e.sum_type == crate::core2d::SphericalType::Cyclic(p))
            .count();
        r.tally("with-cyclic", u64::from(cyclic_sums > 0));
        let base = match nu(&t, p) {
            Ok(v) => v,
            Err(e) => {
                r.check(false, || format!("{} p={p}: {e}", summary(&t)));
                continue;
            }
        };
        r.tally("nonzero", u64::from(base > 0));
        for u in all_build_orders(&t) {
            r.tally("orders", 1);
            let v = nu(&u, p);
            r.check(v == Ok(base), || {
                format!(
                    "{} p={p}: build order gives {v:?}, expected {base}",
                    summary(&u)
                )
            });
        }
        if t.nodes().len() <= closure_nodes {
            for u in move_closure(&t) {
                r.tally("moved", 1);
                // Only efficient realizations carry ν.
                match nu(&u, p) {
                    Err(NuError::Inefficient(_)) => {}
                    v => r.check(v == Ok(base), || {
                        format!(
                            "{} p={p}: moved realization gives {v:?}, expected {base}",
                            summary(&u)
                        )
                    }),
                }
            }
        }
    }
    r
}

/// The count of qualifying cyclic sums depends on the order once vertex
/// sums are allowed, and ν refuses such realizations.
pub fn negative_control_suite(max_p: u32) -> SuiteReport {
    let mut r = SuiteReport::new("vertex-sum-control");
    for p in 2..=max_p {
        if !is_admissible_vertex_triple(order(2), order(2), order(p)) {
            continue;
        }
        r.instances += 1;
        let (vertex_first, cyclic_first) = vertex_sum_reordering(p);
        let a = replay_count(&vertex_first, order(p));
        let b = replay_count(&cyclic_first, order(p));
        r.check(matches!((&a, &b), (Ok(x), Ok(y)) if x != y), || {
            format!("p={p}: replay counts {a:?} and {b:?} do not differ")
        });
        for t in [&vertex_first, &cyclic_first] {
            let v = nu(t, order(p));
            r.check(v == Err(NuError::HasVertexSums), || {
                format!("p={p}: nu gave {v:?}")
            });
        }
    }
    r
}

/// Final forms of all maximal sequences of trivial contractions.
pub fn contraction_outcomes(t: &RealizationTree) -> BTreeSet<CanonicalForm> {
    fn explore(
        t: &RealizationTree,
        seen: &mut HashMap<RealizationTree, ()>,
        out: &mut BTreeSet<CanonicalForm>,
    ) {
        if seen.insert(t.clone(), ()).is_some() {
            return;
        }
        let mut terminal = true;
        for i in 0..t.edges().len() {
            if trivial_endpoint(t, i).is_some() {
                terminal = false;
                let u = contract_trivial(t, i).expect("trivial edge contracts");
                explore(&u, seen, out);
            }
        }
        if terminal {
            out.insert(CanonicalForm::of_tree(t));
        }
    }
    let mut out = BTreeSet::new();
    explore(t, &mut HashMap::new(), &mut out);
    out
}

/// Number of random seeds used for the split process per instance.
pub const SPLIT_SEEDS: u64 = 100;

fn check_confluence(r: &mut SuiteReport, t: &RealizationTree) {
    r.instances += 1;
    let form = match canonicalize(t) {
        Ok(f) => f,
        Err(e) => return r.check(false, || format!("{}: {e}", summary(t))),
    };
    let outcomes = contraction_outcomes(t);
    r.check(outcomes.len() == 1 && outcomes.contains(&form), || {
        format!(
            "{}: contraction outcomes {}",
            summary(t),
            outcomes.iter().map(|f| format!("{{{f}}}")).join(" ")
        )
    });
    let strategies = std::iter::once(SplitStrategy::FirstFit)
        .chain((0..SPLIT_SEEDS).map(|seed| SplitStrategy::Random { seed }));
    let cache = EssentialityCache::new();
    for s in strategies {
        match run_split_strategy(t, s, &cache) {
            Ok(trace) => r.check(trace.final_form == form, || {
                format!(
                    "{}: {s:?} gives {{{}}}, canonical {{{form}}}",
                    summary(t),
                    trace.final_form
                )
            }),
            Err(e) => r.check(false, || format!("{}: {s:?} failed: {e}", summary(t))),
        }
    }
}

/// Contraction confluence and split/canonical agreement over every
/// realization over `alphabet` whose number of sums lies in `edges`. With a
/// `budget`, stops early and marks the report incomplete.
pub fn confluence_suite(
    alphabet: &Alphabet,
    edges: RangeInclusive<usize>,
    budget: Option<Duration>,
) -> SuiteReport {
    let mut r = SuiteReport::new("confluence");
    let start = Instant::now();
    let mut stopped = false;
    for_each_realization(alphabet, edges, true, |t| {
        if stopped {
            return;
        }
        if budget.is_some_and(|b| start.elapsed() > b) {
            stopped = true;
            return;
        }
        check_confluence(&mut r, t);
    });
    r.complete = !stopped;
    r
}

/// As [`confluence_suite`], over `iters` random realizations with at most
/// `max_edges` sums.
pub fn random_confluence_suite(
    alphabet: &Alphabet,
    seed: u64,
    iters: u64,
    max_edges: usize,
) -> SuiteReport {
    let mut r = SuiteReport::new("confluence-random");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..iters {
        let edges = rng.gen_range(0..=max_edges);
        let t = random_realization(&mut rng, alphabet, edges, true);
        check_confluence(&mut r, &t);
    }
    r
}

/// Which suites a `verify` run covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive {
        max_edges: usize,
    },
    Random {
        max_edges: usize,
        seed: u64,
        iters: u64,
    },
}

/// Every suite for the given mode, in a fixed order.
pub fn run_all(mode: VerifyMode) -> Vec<SuiteReport> {
    let mut out = vec![classifier_suite(2, 4, 9)];
    match mode {
        VerifyMode::Exhaustive { max_edges } => {
            out.push(tree_lemma_suite(max_edges));
            out.push(alpha_suite(max_edges));
            out.push(nu_suite(0, 500, max_edges, 5));
            out.push(negative_control_suite(9));
            out.push(confluence_suite(
                &Alphabet::confluence(),
                0..=max_edges,
                None,
            ));
        }
        VerifyMode::Random {
            max_edges,
            seed,
            iters,
        } => {
            out.push(nu_suite(seed, iters, max_edges, 5));
            out.push(negative_control_suite(9));
            out.push(random_confluence_suite(
                &Alphabet::standard(),
                seed,
                iters,
                max_edges,
            ));
        }
    }
    out
}
