//! C4.5-style decision tree: multiway splits on nominal attributes, binary
//! threshold splits on numeric ones, gain ratio as the split criterion,
//! no pruning.
//!
//! Numeric thresholds are placed at midpoints between consecutive distinct
//! values; for each numeric attribute the threshold with the highest
//! information gain is kept, and attributes are then compared by gain ratio.
//! Rows whose split attribute is missing follow the default child, the
//! child that received the most rows.

use serde::{Deserialize, Serialize};

use super::{check_row, majority, training_rows};
use crate::dataset::{Cell, Dataset, Kind};
use crate::error::{Error, Result};
use crate::preprocess::entropy;

const EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            min_leaf: 2,
            max_depth: None,
        }
    }
}

/// Node arena entry. Children are indices into [`DecisionTreeModel::nodes`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum Node {
    Leaf {
        class: u32,
        counts: Vec<usize>,
    },
    Nominal {
        attr: usize,
        /// (category id, child) sorted by category id.
        children: Vec<(u32, usize)>,
        default: usize,
    },
    Numeric {
        attr: usize,
        threshold: f64,
        le: usize,
        gt: usize,
        default: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTreeModel {
    pub params: TreeParams,
    pub n_cols: usize,
    pub n_classes: usize,
    pub nodes: Vec<Node>,
}

enum Split {
    Nominal {
        attr: usize,
        parts: Vec<(u32, Vec<usize>)>,
    },
    Numeric {
        attr: usize,
        threshold: f64,
        le: Vec<usize>,
        gt: Vec<usize>,
    },
}

struct Candidate {
    ratio: f64,
    gain: f64,
    split: Split,
    missing: Vec<usize>,
}

fn class_counts(ds: &Dataset, label: usize, rows: &[usize], n_classes: usize) -> Vec<usize> {
    let mut c = vec![0; n_classes];
    for &r in rows {
        c[ds.row(r)[label].as_nominal().unwrap() as usize] += 1;
    }
    c
}

fn h(counts: &[usize]) -> f64 {
    let f: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    entropy(&f)
}

/// Gain (scaled by the known fraction) and split info for a partition of
/// the known rows, with `n_missing` rows where the attribute is absent.
fn score(known_counts: &[usize], parts: &[Vec<usize>], n_missing: usize, n: usize) -> (f64, f64) {
    let known: usize = known_counts.iter().sum();
    let kf = known as f64;
    let cond: f64 = parts.iter().map(|p| p.iter().sum::<usize>() as f64 / kf * h(p)).sum();
    let gain = kf / n as f64 * (h(known_counts) - cond);
    let mut sizes: Vec<f64> = parts.iter().map(|p| p.iter().sum::<usize>() as f64).collect();
    if n_missing > 0 {
        sizes.push(n_missing as f64);
    }
    (gain.max(0.0), entropy(&sizes))
}

fn nominal_candidate(
    ds: &Dataset,
    label: usize,
    attr: usize,
    rows: &[usize],
    n_classes: usize,
    min_leaf: usize,
) -> Option<Candidate> {
    let n_values = ds.column(attr).categories().len();
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n_values];
    let mut missing = Vec::new();
    for &r in rows {
        match ds.row(r)[attr].as_nominal() {
            Some(v) => groups[v as usize].push(r),
            None => missing.push(r),
        }
    }
    let parts: Vec<(u32, Vec<usize>)> = groups
        .into_iter()
        .enumerate()
        .filter(|(_, g)| !g.is_empty())
        .map(|(v, g)| (v as u32, g))
        .collect();
    if parts.len() < 2 || parts.iter().filter(|p| p.1.len() >= min_leaf).count() < 2 {
        return None;
    }
    let dists: Vec<Vec<usize>> = parts.iter().map(|p| class_counts(ds, label, &p.1, n_classes)).collect();
    let mut known = vec![0; n_classes];
    for d in &dists {
        for (k, c) in known.iter_mut().zip(d) {
            *k += c;
        }
    }
    let (gain, split_info) = score(&known, &dists, missing.len(), rows.len());
    if split_info <= EPS {
        return None;
    }
    Some(Candidate {
        ratio: gain / split_info,
        gain,
        split: Split::Nominal { attr, parts },
        missing,
    })
}

fn numeric_candidate(
    ds: &Dataset,
    label: usize,
    attr: usize,
    rows: &[usize],
    n_classes: usize,
    min_leaf: usize,
) -> Option<Candidate> {
    let mut known: Vec<(f64, u32, usize)> = Vec::with_capacity(rows.len());
    let mut missing = Vec::new();
    for &r in rows {
        let row = ds.row(r);
        match row[attr] {
            Cell::Numeric(x) => known.push((x, row[label].as_nominal().unwrap(), r)),
            _ => missing.push(r),
        }
    }
    if known.len() < 2 * min_leaf.max(1) {
        return None;
    }
    known.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
    let mut total = vec![0usize; n_classes];
    for &(_, y, _) in &known {
        total[y as usize] += 1;
    }
    let kf = known.len() as f64;
    let base = h(&total);
    let mut left = vec![0usize; n_classes];
    let mut best: Option<(f64, usize)> = None;
    for i in 0..known.len() - 1 {
        left[known[i].1 as usize] += 1;
        if known[i].0 == known[i + 1].0 {
            continue;
        }
        let nl = i + 1;
        let nr = known.len() - nl;
        if nl < min_leaf || nr < min_leaf {
            continue;
        }
        let right: Vec<usize> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
        let g = base - (nl as f64 / kf) * h(&left) - (nr as f64 / kf) * h(&right);
        if best.is_none_or(|(bg, _)| g > bg + EPS) {
            best = Some((g, i));
        }
    }
    let (_, i) = best?;
    let threshold = known[i].0 + (known[i + 1].0 - known[i].0) / 2.0;
    // Guard against the midpoint rounding onto the upper value.
    let threshold = if threshold >= known[i + 1].0 {
        known[i].0
    } else {
        threshold
    };
    let le: Vec<usize> = known[..=i].iter().map(|k| k.2).collect();
    let gt: Vec<usize> = known[i + 1..].iter().map(|k| k.2).collect();
    let dl = class_counts(ds, label, &le, n_classes);
    let dr = class_counts(ds, label, &gt, n_classes);
    let (gain, split_info) = score(&total, &[dl, dr], missing.len(), rows.len());
    if split_info <= EPS {
        return None;
    }
    Some(Candidate {
        ratio: gain / split_info,
        gain,
        split: Split::Numeric {
            attr,
            threshold,
            le,
            gt,
        },
        missing,
    })
}

struct Work {
    node: usize,
    rows: Vec<usize>,
    depth: usize,
    used: Vec<bool>,
}

/// Grows an unpruned tree top-down.
///
/// A node becomes a leaf when it is pure, has fewer than `2 * min_leaf`
/// rows, reaches `max_depth`, or has no attribute left that splits it. When
/// every candidate has zero gain ratio on an impure node, the candidate with
/// the highest raw gain (earliest attribute on ties) is used instead, so
/// parity-style targets can still be learned.
pub fn train_decision_tree(train: &Dataset, params: &TreeParams) -> Result<DecisionTreeModel> {
    let (label, rows) = training_rows(train)?;
    if rows.is_empty() {
        return Err(Error::Training("empty training set".into()));
    }
    let n_classes = train.class_names().len();
    let features = train.feature_indices();
    let min_leaf = params.min_leaf.max(1);
    let mut nodes: Vec<Node> = vec![Node::Leaf {
        class: 0,
        counts: Vec::new(),
    }];
    let mut stack = vec![Work {
        node: 0,
        rows,
        depth: 0,
        used: vec![false; train.n_cols()],
    }];
    while let Some(w) = stack.pop() {
        let counts = class_counts(train, label, &w.rows, n_classes);
        let leaf = Node::Leaf {
            class: majority(&counts),
            counts: counts.clone(),
        };
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || w.rows.len() < 2 * min_leaf || params.max_depth.is_some_and(|d| w.depth >= d) {
            nodes[w.node] = leaf;
            continue;
        }
        let candidates: Vec<Candidate> = features
            .iter()
            .filter(|&&a| !w.used[a])
            .filter_map(|&a| match train.column(a).kind {
                Kind::Nominal => nominal_candidate(train, label, a, &w.rows, n_classes, min_leaf),
                Kind::Numeric => numeric_candidate(train, label, a, &w.rows, n_classes, min_leaf),
            })
            .collect();
        let pick = |key: fn(&Candidate) -> f64| {
            candidates
                .iter()
                .enumerate()
                .fold(None::<(usize, f64)>, |best, (i, c)| match best {
                    Some((_, b)) if key(c) <= b + EPS => best,
                    _ => Some((i, key(c))),
                })
        };
        let chosen = match pick(|c| c.ratio) {
            Some((i, r)) if r > EPS => Some(i),
            Some(_) => pick(|c| c.gain).map(|(i, _)| i),
            None => None,
        };
        let Some(chosen) = chosen else {
            nodes[w.node] = leaf;
            continue;
        };
        let Candidate { split, missing, .. } = candidates.into_iter().nth(chosen).unwrap();
        match split {
            Split::Nominal { attr, mut parts } => {
                let default = (0..parts.len())
                    .max_by(|&a, &b| parts[a].1.len().cmp(&parts[b].1.len()).then(b.cmp(&a)))
                    .unwrap();
                parts[default].1.extend(missing);
                let mut used = w.used.clone();
                used[attr] = true;
                let mut children = Vec::with_capacity(parts.len());
                for (v, mut rows) in parts {
                    rows.sort_unstable();
                    let id = nodes.len();
                    nodes.push(Node::Leaf {
                        class: 0,
                        counts: Vec::new(),
                    });
                    children.push((v, id));
                    stack.push(Work {
                        node: id,
                        rows,
                        depth: w.depth + 1,
                        used: used.clone(),
                    });
                }
                nodes[w.node] = Node::Nominal {
                    attr,
                    default: children[default].1,
                    children,
                };
            }
            Split::Numeric {
                attr,
                threshold,
                mut le,
                mut gt,
            } => {
                let le_default = le.len() >= gt.len();
                if le_default {
                    le.extend(missing);
                } else {
                    gt.extend(missing);
                }
                let (li, gi) = (nodes.len(), nodes.len() + 1);
                for _ in 0..2 {
                    nodes.push(Node::Leaf {
                        class: 0,
                        counts: Vec::new(),
                    });
                }
                for (id, mut rows) in [(li, le), (gi, gt)] {
                    rows.sort_unstable();
                    stack.push(Work {
                        node: id,
                        rows,
                        depth: w.depth + 1,
                        used: w.used.clone(),
                    });
                }
                nodes[w.node] = Node::Numeric {
                    attr,
                    threshold,
                    le: li,
                    gt: gi,
                    default: if le_default { li } else { gi },
                };
            }
        }
    }
    Ok(DecisionTreeModel {
        params: params.clone(),
        n_cols: train.n_cols(),
        n_classes,
        nodes,
    })
}

impl DecisionTreeModel {
    pub fn predict(&self, row: &[Cell]) -> Result<u32> {
        check_row(row, self.n_cols)?;
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { class, .. } => return Ok(*class),
                Node::Nominal {
                    attr,
                    children,
                    default,
                } => {
                    at = match row[*attr] {
                        Cell::Nominal(v) => children
                            .binary_search_by_key(&v, |c| c.0)
                            .map_or(*default, |i| children[i].1),
                        _ => *default,
                    };
                }
                Node::Numeric {
                    attr,
                    threshold,
                    le,
                    gt,
                    default,
                } => {
                    at = match row[*attr] {
                        Cell::Numeric(x) if x <= *threshold => *le,
                        Cell::Numeric(_) => *gt,
                        _ => *default,
                    };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((at, d)) = stack.pop() {
            best = best.max(d);
            match &self.nodes[at] {
                Node::Leaf { .. } => {}
                Node::Nominal { children, .. } => stack.extend(children.iter().map(|c| (c.1, d + 1))),
                Node::Numeric { le, gt, .. } => stack.extend([(*le, d + 1), (*gt, d + 1)]),
            }
        }
        best
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. }))
    }
}
