//! Operator graphs: one circuit iteration drawn as local Grover / IAM /
//! reflection operations between `{e, N}` labels.
//!
//! An edge `from -> to` acts on `span{from, to}` with `from` as the first
//! (upper) coordinate of its 2x2 block. Edges carrying the same `order` form
//! one parallel layer and must touch disjoint labels; layers run in
//! ascending order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{IspError, Result};
use crate::label::{enumerate_labels, BasisLabel, ProblemParams, Symbol};
use crate::reduced::{local_edge_op, reflection, EdgeKind, ReducedOperator};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeOp {
    pub kind: EdgeKind,
    pub from: BasisLabel,
    pub to: Option<BasisLabel>,
    pub order: u32,
}

impl EdgeOp {
    pub fn grover(from: BasisLabel, to: BasisLabel, order: u32) -> Self {
        Self {
            kind: EdgeKind::Grover,
            from,
            to: Some(to),
            order,
        }
    }

    pub fn iam(from: BasisLabel, to: BasisLabel, order: u32) -> Self {
        Self {
            kind: EdgeKind::Iam,
            from,
            to: Some(to),
            order,
        }
    }

    pub fn reflection(at: BasisLabel, order: u32) -> Self {
        Self {
            kind: EdgeKind::Reflection,
            from: at,
            to: None,
            order,
        }
    }

    /// Labels the edge acts on.
    pub fn support(&self) -> impl Iterator<Item = &BasisLabel> {
        std::iter::once(&self.from).chain(self.to.iter())
    }

    /// Position at which the endpoints differ (None for reflections).
    pub fn position(&self) -> Option<usize> {
        let to = self.to.as_ref()?;
        self.from.differing_positions(to).first().copied()
    }

    pub fn to_operator(&self, params: &ProblemParams) -> Result<ReducedOperator> {
        local_edge_op(self.kind, &self.from, self.to.as_ref(), params)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorGraph {
    pub k: usize,
    pub edges: Vec<EdgeOp>,
}

impl OperatorGraph {
    pub fn empty(k: usize) -> Self {
        Self { k, edges: vec![] }
    }

    pub fn count(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }

    /// True when a Grover edge joins `a` and `b` in either direction.
    pub fn has_grover(&self, a: &str, b: &str) -> bool {
        let (Ok(a), Ok(b)) = (a.parse::<BasisLabel>(), b.parse::<BasisLabel>()) else {
            return false;
        };
        self.edges.iter().any(|e| {
            e.kind == EdgeKind::Grover
                && ((e.from == a && e.to.as_ref() == Some(&b))
                    || (e.from == b && e.to.as_ref() == Some(&a)))
        })
    }

    /// Labels carrying a reflection edge.
    pub fn reflected_labels(&self) -> Vec<BasisLabel> {
        self.edges
            .iter()
            .filter(|e| e.kind == EdgeKind::Reflection)
            .map(|e| e.from.clone())
            .collect()
    }

    /// Edges grouped by order, ascending.
    pub fn layers(&self) -> BTreeMap<u32, Vec<&EdgeOp>> {
        let mut layers: BTreeMap<u32, Vec<&EdgeOp>> = BTreeMap::new();
        for e in &self.edges {
            layers.entry(e.order).or_default().push(e);
        }
        layers
    }

    /// Checks label lengths, adjacency of two-label edges and disjointness
    /// of every parallel layer.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(IspError::ZeroLevels);
        }
        for e in &self.edges {
            e.from.check_len(self.k)?;
            match (&e.kind, &e.to) {
                (EdgeKind::Reflection, _) => {}
                (_, None) => return Err(IspError::MissingTarget),
                (_, Some(to)) => {
                    to.check_len(self.k)?;
                    if e.from.differing_positions(to).len() != 1 {
                        return Err(IspError::NotAdjacent {
                            from: e.from.to_string(),
                            to: to.to_string(),
                        });
                    }
                }
            }
        }
        for (order, edges) in self.layers() {
            let mut seen = BTreeSet::new();
            for label in edges.iter().flat_map(|e| e.support()) {
                if !seen.insert(label) {
                    return Err(IspError::OverlappingLayer {
                        order,
                        label: label.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: OperatorGraph = serde_json::from_str(text)?;
        g.validate()?;
        Ok(g)
    }
}

/// Operator graph of one `PG_k` iteration.
///
/// Built from the recursion that joins two `PG_{i-1}` copies (suffix `e_i h`
/// and `N_i h`) with a Grover edge between their `t_{i-1}` states and IAM
/// edges on every other bipartite pair. The position-`i` layer gets order
/// `k - i + 1`, so level `k` runs first.
pub fn build_pg_graph(params: &ProblemParams) -> OperatorGraph {
    let k = params.k();
    let mut edges = Vec::with_capacity(k << (k - 1));
    pg_edges(k, k, &[], &mut edges);
    edges.sort_by_key(|e| e.order);
    OperatorGraph { k, edges }
}

fn pg_edges(k: usize, i: usize, suffix: &[Symbol], out: &mut Vec<EdgeOp>) {
    let order = (k - i + 1) as u32;
    let with = |g: &[Symbol], s: Symbol| {
        let mut v = g.to_vec();
        v.push(s);
        v.extend_from_slice(suffix);
        BasisLabel::new(v).expect("non-empty")
    };
    let prefixes: Vec<Vec<Symbol>> = if i == 1 {
        vec![vec![]]
    } else {
        enumerate_labels(i - 1)
            .expect("i >= 2")
            .into_iter()
            .map(|l| l.symbols().to_vec())
            .collect()
    };
    for g in &prefixes {
        let (e, f) = (with(g, Symbol::E), with(g, Symbol::F));
        if g.iter().all(|s| *s == Symbol::E) {
            out.push(EdgeOp::grover(e, f, order));
        } else {
            out.push(EdgeOp::iam(e, f, order));
        }
    }
    if i > 1 {
        for s in [Symbol::E, Symbol::F] {
            let mut h = vec![s];
            h.extend_from_slice(suffix);
            pg_edges(k, i - 1, &h, out);
        }
    }
}

/// Graph of one sequential-Grover stage `SG_stage = IAM(x_stage) O_stage`
/// acting on all of `T_k`.
pub fn build_sg_graph(params: &ProblemParams, stage: usize) -> Result<OperatorGraph> {
    let k = params.k();
    if stage == 0 || stage > k {
        return Err(IspError::LevelOutOfRange { level: stage, k });
    }
    let edges = enumerate_labels(k)?
        .into_iter()
        .filter(|l| l.at(stage) == Symbol::E)
        .map(|e| {
            let f = e.flipped_at(stage);
            if e.has_e_prefix(stage) {
                EdgeOp::grover(e, f, 1)
            } else {
                EdgeOp::iam(e, f, 1)
            }
        })
        .collect();
    Ok(OperatorGraph { k, edges })
}

/// Product of all edge operators, layers in ascending order.
pub fn graph_to_operator(g: &OperatorGraph, params: &ProblemParams) -> Result<ReducedOperator> {
    if g.k != params.k() {
        return Err(IspError::WrongLevelCount {
            expected: params.k(),
            got: g.k,
        });
    }
    g.validate()?;
    let mut op = ReducedOperator::identity(params.dim());
    for (_, layer) in g.layers() {
        for e in layer {
            op = e.to_operator(params)?.compose(&op)?;
        }
    }
    Ok(op)
}

/// Edges of the cubic IAM structure `IAM(t_i N_{i+1} T_{i+2,k})`.
///
/// The cube over free positions `p_1 < .. < p_m` is the pair layer at `p_m`
/// followed by the two sub-cubes (suffix `e` and `N` at `p_m`), which act on
/// disjoint labels; unrolled, layer `p_m` has order 1 and `p_1` order `m`.
pub fn cubic_iam_structure(prefix_len: usize, k: usize) -> Result<OperatorGraph> {
    if k < 2 || prefix_len + 2 > k {
        return Err(IspError::InvalidPrefix { prefix_len, k });
    }
    let free: Vec<usize> = (prefix_len + 2..=k).collect();
    let mut edges = vec![];
    for label in cube_labels(prefix_len, k) {
        for (depth, &pos) in free.iter().rev().enumerate() {
            if label.at(pos) == Symbol::E {
                let to = label.flipped_at(pos);
                edges.push(EdgeOp::iam(label.clone(), to, depth as u32 + 1));
            }
        }
    }
    edges.sort_by_key(|e| e.order);
    Ok(OperatorGraph { k, edges })
}

/// Labels `t_i N_{i+1} s` for every `s` in `T_{i+2,k}`.
pub fn cube_labels(prefix_len: usize, k: usize) -> Vec<BasisLabel> {
    let free = k - prefix_len - 1;
    (0..1usize << free)
        .map(|s| {
            let mut v = vec![Symbol::E; prefix_len];
            v.push(Symbol::F);
            v.extend((0..free).map(|p| {
                if s >> (free - 1 - p) & 1 == 0 {
                    Symbol::E
                } else {
                    Symbol::F
                }
            }));
            BasisLabel::new(v).expect("non-empty")
        })
        .collect()
}

/// Matrix of the cubic IAM structure with prefix `t_i N_{i+1}`.
pub fn cubic_iam_operator(prefix_len: usize, params: &ProblemParams) -> Result<ReducedOperator> {
    let g = cubic_iam_structure(prefix_len, params.k())?;
    graph_to_operator(&g, params)
}

/// The reflection composition that the cube approaches: each IAM edge is
/// replaced by `I_1` on its upper label, so a label is flipped when it is the
/// upper end of an odd number of cube edges.
pub fn cube_reflection(prefix_len: usize, params: &ProblemParams) -> Result<ReducedOperator> {
    let g = cubic_iam_structure(prefix_len, params.k())?;
    reflection(&reflection_parity(&g), params)
}

/// Labels that are the upper endpoint of an odd number of IAM edges.
fn reflection_parity(g: &OperatorGraph) -> Vec<BasisLabel> {
    let mut parity: BTreeMap<&BasisLabel, bool> = BTreeMap::new();
    for e in &g.edges {
        if matches!(e.kind, EdgeKind::Iam | EdgeKind::Reflection) {
            *parity.entry(&e.from).or_default() ^= true;
        }
    }
    let mut out: Vec<BasisLabel> = parity
        .into_iter()
        .filter(|(_, odd)| *odd)
        .map(|(l, _)| l.clone())
        .collect();
    out.sort_by_key(|l| l.index());
    out
}

/// Per-edge record of the Grover-absorption decision.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbsorptionRecord {
    pub edge: EdgeOp,
    pub on_main_path: bool,
    /// IAM edges touching either endpoint in the unrewritten graph.
    pub incident_iam: usize,
    /// Endpoints carrying an odd reflection parity.
    pub reflected_endpoints: usize,
    pub retained: bool,
}

impl AbsorptionRecord {
    /// True when the parity of `incident_iam` disagrees with the decision
    /// taken from reflection parities.
    pub fn count_rule_disagrees(&self) -> bool {
        !self.on_main_path && self.incident_iam.is_multiple_of(2) != self.retained
    }
}

/// Rewrite report: which labels get reflected and what happened to every
/// Grover edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RewriteReport {
    pub reflected: Vec<BasisLabel>,
    pub grover_edges: Vec<AbsorptionRecord>,
    /// For every IAM edge, the prefix length of the cubic structure holding
    /// it (None if it lies in no `t_i N_{i+1} T_{i+2,k}` cube).
    pub iam_cubes: Vec<(EdgeOp, Option<usize>)>,
}

pub fn rewrite_report(g: &OperatorGraph) -> RewriteReport {
    let reflected = reflection_parity(g);
    let is_reflected = |l: &BasisLabel| reflected.contains(l);
    let iam: Vec<&EdgeOp> = g.edges.iter().filter(|e| e.kind == EdgeKind::Iam).collect();

    let grover_edges = g
        .edges
        .iter()
        .filter(|e| e.kind == EdgeKind::Grover)
        .map(|e| {
            let to = e.to.as_ref().expect("grover edge has a target");
            let on_main_path = e.from.is_main_path() && to.is_main_path();
            let incident_iam = iam
                .iter()
                .filter(|x| x.support().any(|l| l == &e.from || l == to))
                .count();
            let reflected_endpoints = e.support().filter(|l| is_reflected(l)).count();
            AbsorptionRecord {
                edge: e.clone(),
                on_main_path,
                incident_iam,
                reflected_endpoints,
                retained: on_main_path || reflected_endpoints == 0,
            }
        })
        .collect();

    let iam_cubes = iam
        .iter()
        .map(|e| {
            let pos = e.position().expect("iam edge has a target");
            let syms = e.from.symbols();
            let cube = syms
                .iter()
                .position(|s| *s == Symbol::F)
                .filter(|&first_f| first_f + 1 < pos);
            ((*e).clone(), cube)
        })
        .collect();

    RewriteReport {
        reflected,
        grover_edges,
        iam_cubes,
    }
}

/// Replaces IAM structures by reflections and absorbs Grover edges that end
/// on a reflected label.
///
/// Each IAM edge is treated as `I_1` on its upper label; the surviving
/// reflections are collected into one final layer. A Grover edge off the main
/// path is absorbed when one of its endpoints is reflected (the product
/// `G(s1, s2) I_1(s2)` stays close to `I_1(s2)`), and retained otherwise.
pub fn approximate_graph(g: &OperatorGraph) -> Result<OperatorGraph> {
    g.validate()?;
    let report = rewrite_report(g);
    let mut edges: Vec<EdgeOp> = report
        .grover_edges
        .iter()
        .filter(|r| r.retained)
        .map(|r| r.edge.clone())
        .collect();
    let last = g.edges.iter().map(|e| e.order).max().unwrap_or(0);
    edges.extend(
        report
            .reflected
            .into_iter()
            .map(|l| EdgeOp::reflection(l, last + 1)),
    );
    edges.sort_by_key(|e| e.order);
    let out = OperatorGraph { k: g.k, edges };
    out.validate()?;
    Ok(out)
}

/// Graphviz rendering: Grover edges solid, IAM edges gray, reflections as
/// dotted self-loops, edge labels carry the layer order.
pub fn emit_dot(g: &OperatorGraph) -> String {
    let mut out = String::new();
    out.push_str("digraph operator_graph {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=ellipse, fontname=\"Helvetica\"];\n");
    for l in enumerate_labels(g.k).unwrap_or_default() {
        let _ = writeln!(out, "  \"{l}\";");
    }
    for e in &g.edges {
        let _ = match (&e.kind, &e.to) {
            (EdgeKind::Grover, Some(to)) => writeln!(
                out,
                "  \"{}\" -> \"{}\" [label=\"{}\", color=black, style=solid];",
                e.from, to, e.order
            ),
            (EdgeKind::Iam, Some(to)) => writeln!(
                out,
                "  \"{}\" -> \"{}\" [label=\"{}\", color=gray, style=solid];",
                e.from, to, e.order
            ),
            _ => writeln!(
                out,
                "  \"{}\" -> \"{}\" [label=\"{}\", color=black, style=dotted];",
                e.from, e.from, e.order
            ),
        };
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduced::{reduced_grover_register, reduced_iam_register, reduced_oracle};

    fn p(k: usize, n: u32) -> ProblemParams {
        ProblemParams::new(k, n).unwrap()
    }

    fn l(s: &str) -> BasisLabel {
        s.parse().unwrap()
    }

    #[test]
    fn pg1_is_single_grover_edge() {
        let g = build_pg_graph(&p(1, 4));
        assert_eq!(g.edges, vec![EdgeOp::grover(l("e"), l("N"), 1)]);
        assert_eq!(build_sg_graph(&p(1, 4), 1).unwrap(), g);
    }

    #[test]
    fn pg2_layers() {
        let g = build_pg_graph(&p(2, 4));
        assert_eq!(g.edges.len(), 4);
        let layers = g.layers();
        let l1: BTreeSet<_> = layers[&1].iter().map(|e| (*e).clone()).collect();
        let l2: BTreeSet<_> = layers[&2].iter().map(|e| (*e).clone()).collect();
        assert_eq!(
            l1,
            BTreeSet::from([
                EdgeOp::grover(l("ee"), l("eN"), 1),
                EdgeOp::iam(l("Ne"), l("NN"), 1)
            ])
        );
        assert_eq!(
            l2,
            BTreeSet::from([
                EdgeOp::grover(l("ee"), l("Ne"), 2),
                EdgeOp::grover(l("eN"), l("NN"), 2)
            ])
        );
    }

    #[test]
    fn pg3_layer_composition() {
        let g = build_pg_graph(&p(3, 4));
        assert_eq!(g.edges.len(), 12);
        let count = |order: u32, kind: EdgeKind| {
            g.edges
                .iter()
                .filter(|e| e.order == order && e.kind == kind)
                .count()
        };
        assert_eq!(
            (count(1, EdgeKind::Grover), count(1, EdgeKind::Iam)),
            (1, 3)
        );
        assert_eq!(
            (count(2, EdgeKind::Grover), count(2, EdgeKind::Iam)),
            (2, 2)
        );
        assert_eq!(
            (count(3, EdgeKind::Grover), count(3, EdgeKind::Iam)),
            (4, 0)
        );
    }

    #[test]
    fn edge_counts_match_unrolled_recursion() {
        for k in 1..=8 {
            let g = build_pg_graph(&p(k, 3));
            assert_eq!(g.edges.len(), k << (k - 1));
            assert_eq!(g.count(EdgeKind::Grover), (1 << k) - 1);
            g.validate().unwrap();
            // recursion equals the concatenation of stages k, k-1, .., 1
            let mut stages = vec![];
            for stage in (1..=k).rev() {
                let mut sg = build_sg_graph(&p(k, 3), stage).unwrap();
                for e in &mut sg.edges {
                    e.order = (k - stage + 1) as u32;
                }
                stages.extend(sg.edges);
            }
            let a: BTreeSet<_> = g.edges.iter().cloned().collect();
            let b: BTreeSet<_> = stages.into_iter().collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn sg_stages() {
        let s1 = build_sg_graph(&p(2, 4), 1).unwrap();
        assert_eq!(s1.count(EdgeKind::Grover), 2);
        assert!(s1.has_grover("ee", "Ne") && s1.has_grover("eN", "NN"));
        let s2 = build_sg_graph(&p(2, 4), 2).unwrap();
        assert!(s2.has_grover("ee", "eN"));
        assert!(s2.edges.contains(&EdgeOp::iam(l("Ne"), l("NN"), 1)));
        assert!(build_sg_graph(&p(2, 4), 3).is_err());
    }

    #[test]
    fn graph_operator_matches_registers() {
        for k in 1..=6 {
            for n in [2u32, 7, 12] {
                let params = p(k, n);
                let g = graph_to_operator(&build_pg_graph(&params), &params).unwrap();
                let mut direct = ReducedOperator::identity(params.dim());
                for i in 1..=k {
                    let gi = &reduced_iam_register(i, &params).unwrap()
                        * &reduced_oracle(i, &params).unwrap();
                    direct = &direct * &gi;
                }
                assert!(g.max_deviation(&direct) < 1e-12, "k={k} n={n}");
                for stage in 1..=k {
                    let sg = graph_to_operator(&build_sg_graph(&params, stage).unwrap(), &params)
                        .unwrap();
                    let gi = reduced_grover_register(stage, &params).unwrap();
                    assert!(sg.max_deviation(&gi) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn empty_graph_is_identity() {
        let params = p(3, 5);
        let op = graph_to_operator(&OperatorGraph::empty(3), &params).unwrap();
        assert_eq!(op, ReducedOperator::identity(8));
    }

    #[test]
    fn overlapping_layer_rejected() {
        let g = OperatorGraph {
            k: 2,
            edges: vec![
                EdgeOp::grover(l("ee"), l("eN"), 1),
                EdgeOp::grover(l("ee"), l("Ne"), 1),
            ],
        };
        assert!(matches!(
            graph_to_operator(&g, &p(2, 3)),
            Err(IspError::OverlappingLayer { order: 1, .. })
        ));
    }

    #[test]
    fn cubic_structures() {
        let c = cubic_iam_structure(1, 3).unwrap();
        assert_eq!(c.edges, vec![EdgeOp::iam(l("eNe"), l("eNN"), 1)]);
        let c = cubic_iam_structure(0, 3).unwrap();
        assert_eq!(c.edges.len(), 4);
        assert_eq!(c.layers()[&1].len(), 2);
        assert!(cubic_iam_structure(2, 3).is_err());
        assert!(cubic_iam_structure(0, 1).is_err());

        // the IAM edges of PG_k are exactly the union of its cubes
        for k in 2..=6 {
            let pg: BTreeSet<_> = build_pg_graph(&p(k, 3))
                .edges
                .into_iter()
                .filter(|e| e.kind == EdgeKind::Iam)
                .map(|e| (e.from, e.to))
                .collect();
            let cubes: BTreeSet<_> = (0..=k - 2)
                .flat_map(|i| cubic_iam_structure(i, k).unwrap().edges)
                .map(|e| (e.from, e.to))
                .collect();
            assert_eq!(pg, cubes);
        }
    }

    #[test]
    fn cube_is_involution() {
        for k in 2..=5 {
            for n in [4u32, 10, 20] {
                let params = p(k, n);
                for i in 0..=k - 2 {
                    let c = cubic_iam_operator(i, &params).unwrap();
                    assert!(
                        c.power(2)
                            .max_deviation(&ReducedOperator::identity(params.dim()))
                            < 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn c2_recursion_three_factor_form() {
        // C_2 = [IAM(e) IAM(N)] IAM(e, N)
        let params = p(3, 6);
        let c = cubic_iam_operator(0, &params).unwrap();
        let pair =
            |a: &str, b: &str| local_edge_op(EdgeKind::Iam, &l(a), Some(&l(b)), &params).unwrap();
        let across = &pair("Nee", "NeN") * &pair("NNe", "NNN");
        let within = &pair("Nee", "NNe") * &pair("NeN", "NNN");
        assert!(c.max_deviation(&(&within * &across)) < 1e-15);
    }

    #[test]
    fn approximate_k2() {
        let a = approximate_graph(&build_pg_graph(&p(2, 4))).unwrap();
        assert_eq!(a.count(EdgeKind::Grover), 2);
        assert!(a.has_grover("ee", "eN") && a.has_grover("eN", "NN"));
        assert_eq!(a.reflected_labels(), vec![l("Ne")]);
    }

    #[test]
    fn approximate_k3() {
        let g = build_pg_graph(&p(3, 4));
        let a = approximate_graph(&g).unwrap();
        assert_eq!(a.count(EdgeKind::Grover), 4);
        for (x, y) in [
            ("NNN", "eNN"),
            ("eNN", "eeN"),
            ("eeN", "eee"),
            ("eee", "Nee"),
        ] {
            assert!(a.has_grover(x, y), "{x}-{y}");
        }
        assert_eq!(a.reflected_labels(), vec![l("eNe"), l("NeN"), l("NNe")]);

        let report = rewrite_report(&g);
        assert!(report.iam_cubes.iter().all(|(_, c)| c.is_some()));
        // the literal incident-count parity keeps G(eeN, NeN); reflection
        // parity absorbs it
        let disagree: Vec<_> = report
            .grover_edges
            .iter()
            .filter(|r| r.count_rule_disagrees())
            .map(|r| {
                (
                    r.edge.from.to_string(),
                    r.edge.to.clone().unwrap().to_string(),
                )
            })
            .collect();
        assert_eq!(disagree, vec![("eeN".to_string(), "NeN".to_string())]);
    }

    #[test]
    fn dot_output() {
        let g = build_pg_graph(&p(1, 4));
        let dot = emit_dot(&g);
        assert_eq!(dot.matches(" -> ").count(), 1);
        assert!(dot.contains("\"e\";") && dot.contains("\"N\";"));
        assert!(dot.contains("style=solid"));
        assert_eq!(dot, emit_dot(&g));

        let a = approximate_graph(&build_pg_graph(&p(2, 4))).unwrap();
        let dot = emit_dot(&a);
        assert_eq!(dot.matches("style=solid").count(), 2);
        assert_eq!(dot.matches("style=dotted").count(), 1);
        assert!(dot.contains("\"Ne\" -> \"Ne\""));
        assert_eq!(dot.lines().filter(|l| l.ends_with("\";")).count(), 4);
    }

    #[test]
    fn json_schema() {
        let g = build_pg_graph(&p(2, 4));
        let text = g.to_json().unwrap();
        assert!(text.contains("\"kind\": \"grover\""));
        assert!(text.contains("\"from\": \"ee\""));
        assert_eq!(OperatorGraph::from_json(&text).unwrap(), g);
        let a = approximate_graph(&g).unwrap();
        let text = a.to_json().unwrap();
        assert!(text.contains("\"to\": null"));
        assert_eq!(OperatorGraph::from_json(&text).unwrap(), a);
        assert!(OperatorGraph::from_json(
            r#"{"k":2,"edges":[{"kind":"grover","from":"ee","to":"NN","order":1}]}"#
        )
        .is_err());
    }
}
