//! Decomposability-preserving connect and disconnect moves applied directly
//! to a junction tree.
//!
//! A connect move picks a link with separator `S` between cliques `C_X` and
//! `C_Y` and completely connects `X ⊆ C_X∖S` to `Y ⊆ C_Y∖S`. A disconnect
//! move picks a clique, splits it into `X`, `Y`, `S` and removes all `X`–`Y`
//! edges. Each comes in four cases (a)–(d), depending on whether the cliques
//! on either side are exactly `X∪S` / `Y∪S` or proper supersets; a connect in
//! case (k) is undone by a disconnect in case (k) and vice versa.
//!
//! Proposals never touch the input tree; [`apply`] returns a new tree.

use rand::seq::SliceRandom;
use rand::Rng;
use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};
use crate::junction_tree::{JunctionTree, NodeId};
use crate::vertex_set::{Vertex, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Connect,
    Disconnect,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Arity {
    Single,
    Multi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Case {
    A,
    B,
    C,
    D,
}

impl Case {
    fn mirrored(self) -> Self {
        match self {
            Case::B => Case::C,
            Case::C => Case::B,
            other => other,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    X,
    Y,
}

impl Side {
    fn flipped(self) -> Self {
        match self {
            Side::X => Side::Y,
            Side::Y => Side::X,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Anchor {
    /// Link joining `x_node` (the clique `C_X`) and `y_node` (`C_Y`).
    Link {
        x_node: NodeId,
        y_node: NodeId,
    },
    Clique(NodeId),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MoveProposal {
    pub direction: Direction,
    pub arity: Arity,
    pub anchor: Anchor,
    pub x: VertexSet,
    pub y: VertexSet,
    pub s: VertexSet,
    pub case: Case,
    /// Disconnect case (a): which new clique each neighbour intersecting
    /// neither `X` nor `Y` is attached to. Connect case (a): which of the two
    /// merged cliques each neighbour came from, so the reverse split can
    /// restore it.
    pub sides: Vec<(NodeId, Side)>,
    pub log_q_forward: f64,
}

impl MoveProposal {
    /// Number of graph edges added (connect) or removed (disconnect).
    pub fn edge_delta(&self) -> usize {
        self.x.len() * self.y.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RejectReason {
    /// Single-clique tree: nothing left to connect.
    NoSeparators,
    SingletonClique,
    /// Some neighbour of the clique meets both `X` and `Y`.
    NeighborIntersectsBoth,
    /// The neighbour configuration matches none of the valid cases.
    CaseCondition,
}

#[derive(Clone, Debug, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Proposal {
    Move(MoveProposal),
    Reject(RejectReason),
}

/// Neighbours of a clique being split, classified by which of `X` and `Y`
/// they meet.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NeighborClassification {
    pub n0: Vec<NodeId>,
    pub nx: Vec<NodeId>,
    pub ny: Vec<NodeId>,
    pub cx: Option<NodeId>,
    pub cy: Option<NodeId>,
}

/// Classifies the neighbours of `node`; `None` if one meets both `X` and `Y`.
/// `C_X` is the lowest-indexed neighbour in `N_X` containing `X∪S`.
pub fn classify_neighbors(j: &JunctionTree, node: NodeId, x: &VertexSet, y: &VertexSet, s: &VertexSet) -> Option<NeighborClassification> {
    let mut out = NeighborClassification::default();
    let (xs, ys) = (x.union(s), y.union(s));
    let mut nbrs: Vec<NodeId> = j.neighbors(node).map(|(n, _)| n).collect();
    nbrs.sort_unstable();
    for n in nbrs {
        let c = j.clique(n);
        match (c.intersects(x), c.intersects(y)) {
            (true, true) => return None,
            (false, false) => out.n0.push(n),
            (true, false) => {
                out.nx.push(n);
                if out.cx.is_none() && xs.is_subset(c) {
                    out.cx = Some(n);
                }
            }
            (false, true) => {
                out.ny.push(n);
                if out.cy.is_none() && ys.is_subset(c) {
                    out.cy = Some(n);
                }
            }
        }
    }
    Some(out)
}

fn disconnect_case(cls: &NeighborClassification) -> Option<Case> {
    match (cls.cx, cls.cy) {
        (None, None) => Some(Case::A),
        (Some(_), None) => (cls.nx.len() == 1).then_some(Case::B),
        (None, Some(_)) => (cls.ny.len() == 1).then_some(Case::C),
        (Some(_), Some(_)) => (cls.n0.is_empty() && cls.nx.len() == 1 && cls.ny.len() == 1).then_some(Case::D),
    }
}

fn ln_choose(n: usize, k: usize) -> f64 {
    ln_factorial(n as u64) - ln_factorial(k as u64) - ln_factorial((n - k) as u64)
}

/// Draws a non-empty subset of `pool`: one uniform element for single-edge
/// moves; otherwise a uniform size in `1..=|pool|` then a uniform subset.
fn draw_subset<R: Rng + ?Sized>(pool: &VertexSet, arity: Arity, rng: &mut R) -> VertexSet {
    let members = pool.as_slice();
    match arity {
        Arity::Single => VertexSet::singleton(members[rng.random_range(0..members.len())]),
        Arity::Multi => {
            let size = rng.random_range(1..=members.len());
            let mut v: Vec<Vertex> = members.to_vec();
            let (chosen, _) = v.partial_shuffle(rng, size);
            chosen.iter().copied().collect()
        }
    }
}

pub fn propose<R: Rng + ?Sized>(j: &JunctionTree, direction: Direction, arity: Arity, rng: &mut R) -> Proposal {
    match direction {
        Direction::Connect => propose_connect(j, arity, rng),
        Direction::Disconnect => propose_disconnect(j, arity, rng),
    }
}

/// Picks a separator uniformly (with multiplicity), then `X` and `Y` from
/// either side of it.
pub fn propose_connect<R: Rng + ?Sized>(j: &JunctionTree, arity: Arity, rng: &mut R) -> Proposal {
    let links = j.links();
    if links.is_empty() {
        return Proposal::Reject(RejectReason::NoSeparators);
    }
    let link = &links[rng.random_range(0..links.len())];
    let (a, b) = (link.a, link.b);
    let x = draw_subset(&j.clique(a).difference(&link.separator), arity, rng);
    let y = draw_subset(&j.clique(b).difference(&link.separator), arity, rng);
    Proposal::Move(connect_move(j, a, b, x, y, arity).expect("sampled connect is well formed"))
}

/// Picks a clique uniformly and partitions it into `X`, `Y`, `S`.
pub fn propose_disconnect<R: Rng + ?Sized>(j: &JunctionTree, arity: Arity, rng: &mut R) -> Proposal {
    let ids = j.node_ids();
    let node = ids[rng.random_range(0..ids.len())];
    let clique = j.clique(node);
    let m = clique.len();
    if m == 1 {
        return Proposal::Reject(RejectReason::SingletonClique);
    }
    let mut members: Vec<Vertex> = clique.as_slice().to_vec();
    let (x, y, s): (VertexSet, VertexSet, VertexSet) = match arity {
        Arity::Single => {
            let (pair, rest) = members.partial_shuffle(rng, 2);
            (VertexSet::singleton(pair[0]), VertexSet::singleton(pair[1]), rest.iter().copied().collect())
        }
        Arity::Multi => {
            let big_m = rng.random_range(2..=m);
            let n = rng.random_range(1..big_m);
            members.shuffle(rng);
            (
                members[..n].iter().copied().collect(),
                members[n..big_m].iter().copied().collect(),
                members[big_m..].iter().copied().collect(),
            )
        }
    };
    let Some(cls) = classify_neighbors(j, node, &x, &y, &s) else {
        return Proposal::Reject(RejectReason::NeighborIntersectsBoth);
    };
    let Some(case) = disconnect_case(&cls) else {
        return Proposal::Reject(RejectReason::CaseCondition);
    };
    let sides: Vec<(NodeId, Side)> = if case == Case::A {
        cls.n0.iter().map(|&n| (n, if rng.random_bool(0.5) { Side::X } else { Side::Y })).collect()
    } else {
        Vec::new()
    };
    Proposal::Move(disconnect_move(j, node, x, y, s, arity, sides).expect("sampled disconnect is well formed"))
}

/// Describes connecting `X ⊆ C_X∖S` and `Y ⊆ C_Y∖S` across the link between
/// `x_node` and `y_node`.
pub fn connect_move(j: &JunctionTree, x_node: NodeId, y_node: NodeId, x: VertexSet, y: VertexSet, arity: Arity) -> Result<MoveProposal> {
    let invalid = |m: &str| Error::InvalidProposal(m.to_string());
    if !j.is_live(x_node) || !j.is_live(y_node) {
        return Err(invalid("anchor nodes are not in the tree"));
    }
    let link = j.find_link(x_node, y_node).ok_or_else(|| invalid("anchor nodes are not linked"))?;
    let s = j.link(link).separator.clone();
    let (cx, cy) = (j.clique(x_node), j.clique(y_node));
    if x.is_empty() || y.is_empty() || !x.is_subset(cx) || !y.is_subset(cy) || x.intersects(&s) || y.intersects(&s) {
        return Err(invalid("X and Y must be non-empty subsets of the cliques outside the separator"));
    }
    if arity == Arity::Single && (x.len() != 1 || y.len() != 1) {
        return Err(invalid("single-edge moves need singleton X and Y"));
    }
    let case = match (cx.len() == x.len() + s.len(), cy.len() == y.len() + s.len()) {
        (true, true) => Case::A,
        (false, true) => Case::B,
        (true, false) => Case::C,
        (false, false) => Case::D,
    };
    let sides = if case == Case::A {
        let mut sides: Vec<(NodeId, Side)> = j
            .neighbors(x_node)
            .filter(|&(n, _)| n != y_node)
            .map(|(n, _)| (n, Side::X))
            .chain(j.neighbors(y_node).filter(|&(n, _)| n != x_node).map(|(n, _)| (n, Side::Y)))
            .collect();
        sides.sort_unstable_by_key(|&(n, _)| n);
        sides
    } else {
        Vec::new()
    };
    let mut p = MoveProposal {
        direction: Direction::Connect,
        arity,
        anchor: Anchor::Link { x_node, y_node },
        x,
        y,
        s,
        case,
        sides,
        log_q_forward: 0.0,
    };
    canonicalize(&mut p);
    p.log_q_forward = proposal_probability(j, &p)?;
    Ok(p)
}

/// Describes splitting clique `node = X∪Y∪S`; `sides` assigns the
/// neighbours meeting neither `X` nor `Y` in case (a) and must be empty
/// otherwise.
pub fn disconnect_move(
    j: &JunctionTree,
    node: NodeId,
    x: VertexSet,
    y: VertexSet,
    s: VertexSet,
    arity: Arity,
    sides: Vec<(NodeId, Side)>,
) -> Result<MoveProposal> {
    let mut p = MoveProposal {
        direction: Direction::Disconnect,
        arity,
        anchor: Anchor::Clique(node),
        case: Case::A,
        x,
        y,
        s,
        sides,
        log_q_forward: 0.0,
    };
    let cls = disconnect_structure(j, &p)?;
    p.case = disconnect_case(&cls).ok_or_else(|| Error::InvalidProposal("no valid disconnect case".into()))?;
    check_sides(&p, &cls)?;
    canonicalize(&mut p);
    p.log_q_forward = proposal_probability(j, &p)?;
    Ok(p)
}

/// Puts the smallest vertex of `X∪Y` in `X`.
fn canonicalize(p: &mut MoveProposal) {
    let min_x = p.x.min_vertex();
    let min_y = p.y.min_vertex();
    if min_y < min_x {
        std::mem::swap(&mut p.x, &mut p.y);
        p.case = p.case.mirrored();
        for entry in &mut p.sides {
            entry.1 = entry.1.flipped();
        }
        if let Anchor::Link { x_node, y_node } = p.anchor {
            p.anchor = Anchor::Link { x_node: y_node, y_node: x_node };
        }
    }
}

fn disconnect_structure(j: &JunctionTree, p: &MoveProposal) -> Result<NeighborClassification> {
    let invalid = |m: &str| Error::InvalidProposal(m.to_string());
    let Anchor::Clique(node) = p.anchor else {
        return Err(invalid("disconnect must be anchored at a clique"));
    };
    if !j.is_live(node) {
        return Err(invalid("anchor clique is not in the tree"));
    }
    if p.x.is_empty() || p.y.is_empty() || p.x.intersects(&p.y) || p.x.intersects(&p.s) || p.y.intersects(&p.s) {
        return Err(invalid("X, Y must be non-empty and X, Y, S pairwise disjoint"));
    }
    if &p.x.union(&p.y).union(&p.s) != j.clique(node) {
        return Err(invalid("X ∪ Y ∪ S must equal the anchor clique"));
    }
    if p.arity == Arity::Single && (p.x.len() != 1 || p.y.len() != 1) {
        return Err(invalid("single-edge moves need singleton X and Y"));
    }
    classify_neighbors(j, node, &p.x, &p.y, &p.s).ok_or_else(|| invalid("a neighbour meets both X and Y"))
}

fn check_sides(p: &MoveProposal, cls: &NeighborClassification) -> Result<()> {
    let expected: Vec<NodeId> = if p.case == Case::A { cls.n0.clone() } else { Vec::new() };
    let mut given: Vec<NodeId> = p.sides.iter().map(|&(n, _)| n).collect();
    given.sort_unstable();
    if given != expected {
        return Err(Error::InvalidProposal("side assignment must cover exactly the neighbours meeting neither X nor Y".into()));
    }
    Ok(())
}

/// Log-probability that the proposal mechanism, started from `j`, emits the
/// unordered outcome described by `p` (including the case (a) side choices).
/// The 1/2 for choosing connect or disconnect is left out; it cancels.
pub fn proposal_probability(j: &JunctionTree, p: &MoveProposal) -> Result<f64> {
    let ln2 = std::f64::consts::LN_2;
    match p.direction {
        Direction::Connect => {
            let Anchor::Link { x_node, y_node } = p.anchor else {
                return Err(Error::InvalidProposal("connect must be anchored at a link".into()));
            };
            let link = j.find_link(x_node, y_node).ok_or_else(|| Error::InvalidProposal("anchor nodes are not linked".into()))?;
            let s = &j.link(link).separator;
            let free_x = j.clique(x_node).len() - s.len();
            let free_y = j.clique(y_node).len() - s.len();
            if p.x.len() > free_x || p.y.len() > free_y {
                return Err(Error::InvalidProposal("X or Y larger than its clique".into()));
            }
            let mut lq = -(j.separator_count() as f64).ln() - (free_x as f64).ln() - (free_y as f64).ln();
            if p.arity == Arity::Multi {
                lq -= ln_choose(free_x, p.x.len()) + ln_choose(free_y, p.y.len());
            }
            Ok(lq)
        }
        Direction::Disconnect => {
            let cls = disconnect_structure(j, p)?;
            let m = p.x.len() + p.y.len() + p.s.len();
            let mut lq = -(j.clique_count() as f64).ln() + ln2;
            match p.arity {
                Arity::Single => lq -= ((m * (m - 1)) as f64).ln(),
                Arity::Multi => {
                    let big_m = p.x.len() + p.y.len();
                    lq -= (((m - 1) * (big_m - 1)) as f64).ln();
                    lq += ln_factorial(p.x.len() as u64) + ln_factorial(p.y.len() as u64) + ln_factorial(p.s.len() as u64)
                        - ln_factorial(m as u64);
                }
            }
            if p.case == Case::A {
                lq -= cls.n0.len() as f64 * ln2;
            }
            Ok(lq)
        }
    }
}

pub fn apply(j: &JunctionTree, p: &MoveProposal) -> Result<JunctionTree> {
    match p.direction {
        Direction::Connect => apply_connect(j, p),
        Direction::Disconnect => apply_disconnect(j, p),
    }
}

pub fn apply_connect(j: &JunctionTree, p: &MoveProposal) -> Result<JunctionTree> {
    if p.direction != Direction::Connect {
        return Err(Error::InvalidProposal("not a connect move".into()));
    }
    let Anchor::Link { x_node, y_node } = p.anchor else {
        return Err(Error::InvalidProposal("connect must be anchored at a link".into()));
    };
    let fresh = connect_move(j, x_node, y_node, p.x.clone(), p.y.clone(), p.arity)?;
    if fresh.s != p.s || fresh.case != p.case || fresh.anchor != p.anchor {
        return Err(Error::InvalidProposal("proposal does not match the tree".into()));
    }
    let (x_node, y_node) = match fresh.anchor {
        Anchor::Link { x_node, y_node } => (x_node, y_node),
        Anchor::Clique(_) => unreachable!(),
    };
    let mut out = j.clone();
    let link = out.find_link(x_node, y_node).expect("checked above");
    let xys = p.x.union(&p.y).union(&p.s);
    match p.case {
        Case::A => {
            out.remove_link(link);
            out.set_clique(x_node, xys);
            let moved: Vec<_> = out.neighbors(y_node).map(|(_, l)| l).collect();
            for l in moved {
                out.relink(l, y_node, x_node);
            }
            out.remove_node(y_node);
        }
        Case::B => {
            out.set_clique(y_node, xys);
            out.set_separator(link, p.x.union(&p.s));
        }
        Case::C => {
            out.set_clique(x_node, xys);
            out.set_separator(link, p.y.union(&p.s));
        }
        Case::D => {
            out.remove_link(link);
            let mid = out.add_node(xys);
            out.add_link(x_node, mid, p.x.union(&p.s));
            out.add_link(mid, y_node, p.y.union(&p.s));
        }
    }
    Ok(out)
}

pub fn apply_disconnect(j: &JunctionTree, p: &MoveProposal) -> Result<JunctionTree> {
    if p.direction != Direction::Disconnect {
        return Err(Error::InvalidProposal("not a disconnect move".into()));
    }
    let cls = disconnect_structure(j, p)?;
    if disconnect_case(&cls) != Some(p.case) {
        return Err(Error::InvalidProposal("case does not match the tree".into()));
    }
    check_sides(p, &cls)?;
    let Anchor::Clique(node) = p.anchor else { unreachable!() };
    let mut out = j.clone();
    let (xs, ys) = (p.x.union(&p.s), p.y.union(&p.s));
    match p.case {
        Case::A => {
            out.set_clique(node, xs);
            let fresh = out.add_node(ys);
            out.add_link(node, fresh, p.s.clone());
            let to_y = cls.ny.iter().copied().chain(p.sides.iter().filter(|&&(_, side)| side == Side::Y).map(|&(n, _)| n));
            for n in to_y.collect::<Vec<_>>() {
                let l = out.find_link(node, n).expect("neighbour link");
                out.relink(l, node, fresh);
            }
        }
        Case::B => {
            let cx = cls.cx.expect("case (b) has C_X");
            out.set_clique(node, ys);
            let l = out.find_link(node, cx).expect("link to C_X");
            out.set_separator(l, p.s.clone());
        }
        Case::C => {
            let cy = cls.cy.expect("case (c) has C_Y");
            out.set_clique(node, xs);
            let l = out.find_link(node, cy).expect("link to C_Y");
            out.set_separator(l, p.s.clone());
        }
        Case::D => {
            let (cx, cy) = (cls.cx.expect("C_X"), cls.cy.expect("C_Y"));
            let l = out.find_link(node, cx).expect("link to C_X");
            out.remove_link(l);
            let l = out.find_link(node, cy).expect("link to C_Y");
            out.remove_link(l);
            out.remove_node(node);
            out.add_link(cx, cy, p.s.clone());
        }
    }
    Ok(out)
}

/// The unique move that undoes `p`, expressed against the tree `j_new`
/// obtained by applying `p`.
pub fn reverse_move(j_new: &JunctionTree, p: &MoveProposal) -> Result<MoveProposal> {
    let rev = match p.direction {
        Direction::Connect => {
            let xy = p.x.union(&p.y);
            let holders = j_new.nodes_containing_set(&xy);
            let [node] = holders[..] else {
                return Err(Error::InvalidProposal(format!("{} cliques contain X∪Y after connecting", holders.len())));
            };
            let sides = if p.case == Case::A {
                let cls = classify_neighbors(j_new, node, &p.x, &p.y, &p.s)
                    .ok_or_else(|| Error::InvalidProposal("reverse split is blocked".into()))?;
                p.sides.iter().copied().filter(|(n, _)| cls.n0.contains(n)).collect()
            } else {
                Vec::new()
            };
            disconnect_move(j_new, node, p.x.clone(), p.y.clone(), p.s.clone(), p.arity, sides)?
        }
        Direction::Disconnect => {
            let xs = p.x.union(&p.s);
            let mut found = None;
            for a in j_new.nodes_containing_set(&xs) {
                for (b, l) in j_new.neighbors(a) {
                    if j_new.link(l).separator == p.s && p.y.is_subset(j_new.clique(b)) {
                        found = Some((a, b));
                    }
                }
            }
            let (a, b) = found.ok_or_else(|| Error::InvalidProposal("no link joins X∪S and Y∪S".into()))?;
            connect_move(j_new, a, b, p.x.clone(), p.y.clone(), p.arity)?
        }
    };
    if rev.case != p.case {
        return Err(Error::InvalidProposal(format!("reverse move is case {:?}, forward was {:?}", rev.case, p.case)));
    }
    Ok(rev)
}

/// `log q(J', J)` for the move undoing `p`.
pub fn reverse_proposal(j_new: &JunctionTree, p: &MoveProposal) -> Result<f64> {
    Ok(reverse_move(j_new, p)?.log_q_forward)
}

#[cfg(test)]
mod tests;
