//! Graph comparison modulo blank-node relabeling.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use sha2::{Digest, Sha256};

use crate::model::{BlankNode, Graph, Subject, Term, Triple};

/// True iff the ground parts of `a` and `b` are equal and their blank-node
/// parts are isomorphic under some bijection of blank labels.
///
/// The bijection search is exhaustive (with degree-based pruning) and
/// exponential in the worst case.
pub fn graph_equal_ground(a: &Graph, b: &Graph) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let (ground_a, blank_a): (Vec<&Triple>, Vec<&Triple>) = a.iter().partition(|t| !t.has_blank());
    let (ground_b, blank_b): (Vec<&Triple>, Vec<&Triple>) = b.iter().partition(|t| !t.has_blank());
    if ground_a != ground_b || blank_a.len() != blank_b.len() {
        return false;
    }
    if blank_a.is_empty() {
        return true;
    }
    let sa = BlankSide::new(&blank_a);
    let sb = BlankSide::new(&blank_b);
    if sa.nodes.len() != sb.nodes.len() {
        return false;
    }
    let mut sig_a: Vec<_> = sa.signatures.clone();
    let mut sig_b: Vec<_> = sb.signatures.clone();
    sig_a.sort();
    sig_b.sort();
    if sig_a != sig_b {
        return false;
    }

    // most constrained first
    let mut order: Vec<usize> = (0..sa.nodes.len()).collect();
    order.sort_by_key(|&i| {
        let candidates = sb.signatures.iter().filter(|s| **s == sa.signatures[i]).count();
        (candidates, std::cmp::Reverse(sa.incident[i].len()))
    });

    let target: BTreeSet<&Triple> = blank_b.iter().copied().collect();
    let mut mapping: Vec<Option<usize>> = vec![None; sa.nodes.len()];
    let mut used = vec![false; sb.nodes.len()];
    search(&sa, &sb, &target, &order, 0, &mut mapping, &mut used)
}

/// Ground context of one blank node: (outgoing, predicate, ground other end).
type Neighbourhood<'a> = Vec<(bool, &'a str, Option<&'a Term>)>;

struct BlankSide<'a> {
    nodes: Vec<&'a BlankNode>,
    index: HashMap<&'a BlankNode, usize>,
    /// (out-degree, in-degree, ground neighbourhood) per blank node
    signatures: Vec<(usize, usize, Neighbourhood<'a>)>,
    /// indices into `triples` incident to each node
    incident: Vec<Vec<usize>>,
    triples: Vec<&'a Triple>,
}

impl<'a> BlankSide<'a> {
    fn new(triples: &[&'a Triple]) -> Self {
        let mut nodes: Vec<&BlankNode> = Vec::new();
        let mut index = HashMap::new();
        let mut add = |b: &'a BlankNode, nodes: &mut Vec<&'a BlankNode>| {
            *index.entry(b).or_insert_with(|| {
                nodes.push(b);
                nodes.len() - 1
            })
        };
        for t in triples {
            if let Subject::Blank(b) = &t.subject {
                add(b, &mut nodes);
            }
            if let Term::Blank(b) = &t.object {
                add(b, &mut nodes);
            }
        }
        let n = nodes.len();
        let mut signatures = vec![(0, 0, Vec::new()); n];
        let mut incident = vec![Vec::new(); n];
        for (ti, t) in triples.iter().enumerate() {
            let object_ground = (!t.object.is_blank()).then_some(&t.object);
            if let Subject::Blank(b) = &t.subject {
                let i = index[b];
                signatures[i].0 += 1;
                signatures[i].2.push((true, t.predicate.as_str(), object_ground));
                incident[i].push(ti);
            }
            if let Term::Blank(b) = &t.object {
                let i = index[b];
                signatures[i].1 += 1;
                signatures[i].2.push((false, t.predicate.as_str(), None));
                if !incident[i].contains(&ti) {
                    incident[i].push(ti);
                }
            }
        }
        for s in &mut signatures {
            s.2.sort();
        }
        BlankSide {
            nodes,
            index,
            signatures,
            incident,
            triples: triples.to_vec(),
        }
    }
}

fn search(
    sa: &BlankSide<'_>,
    sb: &BlankSide<'_>,
    target: &BTreeSet<&Triple>,
    order: &[usize],
    depth: usize,
    mapping: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
) -> bool {
    let Some(&node) = order.get(depth) else {
        return true;
    };
    for cand in 0..sb.nodes.len() {
        if used[cand] || sb.signatures[cand] != sa.signatures[node] {
            continue;
        }
        mapping[node] = Some(cand);
        used[cand] = true;
        if consistent(sa, sb, target, node, mapping) && search(sa, sb, target, order, depth + 1, mapping, used) {
            return true;
        }
        mapping[node] = None;
        used[cand] = false;
    }
    false
}

/// Every triple touching `node` whose blanks are all mapped must exist on the
/// other side.
fn consistent(
    sa: &BlankSide<'_>,
    sb: &BlankSide<'_>,
    target: &BTreeSet<&Triple>,
    node: usize,
    mapping: &[Option<usize>],
) -> bool {
    let map_subject = |s: &Subject| -> Option<Subject> {
        match s {
            Subject::Blank(b) => mapping[sa.index[b]].map(|j| Subject::Blank(sb.nodes[j].clone())),
            other => Some(other.clone()),
        }
    };
    let map_term = |t: &Term| -> Option<Term> {
        match t {
            Term::Blank(b) => mapping[sa.index[b]].map(|j| Term::Blank(sb.nodes[j].clone())),
            other => Some(other.clone()),
        }
    };
    sa.incident[node].iter().all(|&ti| {
        let t = sa.triples[ti];
        match (map_subject(&t.subject), map_term(&t.object)) {
            (Some(s), Some(o)) => target.contains(&Triple::new(s, t.predicate.clone(), o)),
            _ => true,
        }
    })
}

type Color = [u8; 32];

/// Upper bound on the number of fully-refined leaves explored while breaking
/// ties between indistinguishable blank nodes. Past it, remaining ties are
/// broken by the input label order.
const LEAF_BUDGET: usize = 4096;

/// Relabels blank nodes `c0`, `c1`, ... from iterated neighbourhood hashes.
///
/// Colour refinement runs to a fixed point; remaining ties are resolved by
/// trying each member of the first tied class and keeping the smallest
/// resulting graph, so the output depends only on the graph's structure as
/// long as the search stays within its budget.
pub fn canonical_blank_labels(g: &Graph) -> Graph {
    let blank_triples: Vec<&Triple> = g.iter().filter(|t| t.has_blank()).collect();
    if blank_triples.is_empty() {
        return g.clone();
    }
    let ctx = CanonContext::new(&blank_triples);
    let initial = ctx.refine(vec![hash_parts(&[b"blank"]); ctx.nodes.len()]);
    let mut budget = LEAF_BUDGET;
    let (_, best) = ctx.search(initial, &mut budget);

    let labels: Vec<BlankNode> = best
        .iter()
        .map(|rank| BlankNode::new(&format!("c{rank}")).expect("valid label"))
        .collect();
    let mut out: Graph = g.iter().map(|t| ctx.relabel(t, &labels)).collect();
    out.set_prefixes(g.prefixes().clone());
    out
}

struct CanonContext<'a> {
    nodes: Vec<&'a BlankNode>,
    index: HashMap<&'a BlankNode, usize>,
    /// per node: (outgoing?, predicate, neighbour)
    edges: Vec<Vec<(bool, &'a str, Neighbour)>>,
    triples: Vec<&'a Triple>,
}

#[derive(Clone)]
enum Neighbour {
    Ground(String),
    Blank(usize),
}

impl<'a> CanonContext<'a> {
    fn new(triples: &[&'a Triple]) -> Self {
        let mut nodes: Vec<&BlankNode> = Vec::new();
        let mut index: HashMap<&BlankNode, usize> = HashMap::new();
        for t in triples {
            for b in blanks_of(t) {
                index.entry(b).or_insert_with(|| {
                    nodes.push(b);
                    nodes.len() - 1
                });
            }
        }
        // deterministic tie-break order: input labels
        let mut sorted: Vec<&BlankNode> = nodes.clone();
        sorted.sort();
        let index: HashMap<&BlankNode, usize> = sorted.iter().enumerate().map(|(i, b)| (*b, i)).collect();
        let nodes = sorted;

        let mut edges: Vec<Vec<(bool, &str, Neighbour)>> = (0..nodes.len()).map(|_| Vec::new()).collect();
        for t in triples {
            let p = t.predicate.as_str();
            let obj = match &t.object {
                Term::Blank(b) => Neighbour::Blank(index[b]),
                other => Neighbour::Ground(other.to_string()),
            };
            let subj = match &t.subject {
                Subject::Blank(b) => Neighbour::Blank(index[b]),
                other => Neighbour::Ground(other.to_string()),
            };
            if let Subject::Blank(b) = &t.subject {
                edges[index[b]].push((true, p, obj.clone()));
            }
            if let Term::Blank(b) = &t.object {
                edges[index[b]].push((false, p, subj));
            }
        }
        CanonContext {
            nodes,
            index,
            edges,
            triples: triples.to_vec(),
        }
    }

    fn refine(&self, mut colors: Vec<Color>) -> Vec<Color> {
        let mut classes = count_classes(&colors);
        loop {
            let next: Vec<Color> = (0..self.nodes.len())
                .map(|i| {
                    let mut items: Vec<Color> = self.edges[i]
                        .iter()
                        .map(|(out, p, n)| {
                            let dir: &[u8] = if *out { b">" } else { b"<" };
                            match n {
                                Neighbour::Ground(s) => hash_parts(&[dir, p.as_bytes(), b"g", s.as_bytes()]),
                                Neighbour::Blank(j) => hash_parts(&[dir, p.as_bytes(), b"b", &colors[*j]]),
                            }
                        })
                        .collect();
                    items.sort();
                    let mut parts: Vec<&[u8]> = vec![&colors[i]];
                    parts.extend(items.iter().map(|c| c.as_slice()));
                    hash_parts(&parts)
                })
                .collect();
            let next_classes = count_classes(&next);
            colors = next;
            if next_classes == classes {
                return colors;
            }
            classes = next_classes;
        }
    }

    /// Returns the smallest relabeled triple set reachable from `colors`
    /// together with the rank assignment producing it.
    fn search(&self, colors: Vec<Color>, budget: &mut usize) -> (BTreeSet<Triple>, Vec<usize>) {
        let mut groups: BTreeMap<Color, Vec<usize>> = BTreeMap::new();
        for (i, c) in colors.iter().enumerate() {
            groups.entry(*c).or_default().push(i);
        }
        let tied = groups.values().find(|members| members.len() > 1);
        let Some(tied) = tied else {
            *budget = budget.saturating_sub(1);
            let mut ranked: Vec<usize> = (0..colors.len()).collect();
            ranked.sort_by_key(|&i| colors[i]);
            let mut ranks = vec![0; colors.len()];
            for (rank, &i) in ranked.iter().enumerate() {
                ranks[i] = rank;
            }
            let labels: Vec<BlankNode> = ranks
                .iter()
                .map(|r| BlankNode::new(&format!("c{r}")).expect("valid label"))
                .collect();
            let set = self.triples.iter().map(|t| self.relabel(t, &labels)).collect();
            return (set, ranks);
        };
        let mut best: Option<(BTreeSet<Triple>, Vec<usize>)> = None;
        for &member in tied {
            if best.is_some() && *budget == 0 {
                break;
            }
            let mut next = colors.clone();
            next[member] = hash_parts(&[&colors[member], b"distinguished"]);
            let candidate = self.search(self.refine(next), budget);
            if best.as_ref().is_none_or(|(b, _)| candidate.0 < *b) {
                best = Some(candidate);
            }
        }
        best.expect("tied class is non-empty")
    }

    fn relabel(&self, t: &Triple, labels: &[BlankNode]) -> Triple {
        let subject = match &t.subject {
            Subject::Blank(b) => Subject::Blank(labels[self.index[b]].clone()),
            s => s.clone(),
        };
        let object = match &t.object {
            Term::Blank(b) => Term::Blank(labels[self.index[b]].clone()),
            o => o.clone(),
        };
        Triple::new(subject, t.predicate.clone(), object)
    }
}

fn blanks_of(t: &Triple) -> impl Iterator<Item = &BlankNode> {
    let s = match &t.subject {
        Subject::Blank(b) => Some(b),
        _ => None,
    };
    let o = match &t.object {
        Term::Blank(b) => Some(b),
        _ => None,
    };
    s.into_iter().chain(o)
}

fn count_classes(colors: &[Color]) -> usize {
    colors.iter().collect::<BTreeSet<_>>().len()
}

fn hash_parts(parts: &[&[u8]]) -> Color {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    h.finalize().into()
}
