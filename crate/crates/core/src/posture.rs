//! Body-posture codebook.
//!
//! Part offsets of a person detection are scaled to a unit-area box and
//! vector-quantized against a codebook trained by bisecting k-means: the
//! cluster with the largest within-cluster SSE is split in two until the
//! requested number of leaves exists.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scene::Detection;

pub const DEFAULT_CODEBOOK_SIZE: usize = 49;

/// Part offsets normalized by `sqrt(box area)`, flattened as `dx0 dy0 dx1 ...`.
/// Coordinates with `mask == false` are padding for absent parts and take no
/// part in distances.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseVector {
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
}

impl PoseVector {
    pub fn dense(values: Vec<f64>) -> Self {
        let mask = vec![true; values.len()];
        PoseVector { values, mask }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Pads or truncates to `dim` coordinates; padding is masked out.
    pub fn fit_to(mut self, dim: usize) -> Self {
        self.values.resize(dim, 0.0);
        self.mask.resize(dim, false);
        self
    }
}

pub fn pose_vector(det: &Detection) -> Result<PoseVector> {
    if det.parts.is_empty() {
        return Err(Error::invalid(format!("{} detection has no parts", det.class)));
    }
    let area = det.bbox.area();
    if area <= 0.0 {
        return Err(Error::invalid("detection box has no area"));
    }
    let scale = area.sqrt();
    let values = det.parts.iter().flat_map(|&(x, y)| [x / scale, y / scale]).collect();
    Ok(PoseVector::dense(values))
}

/// Squared distance over coordinates present in `v`.
fn masked_sq_dist(v: &PoseVector, c: &[f64]) -> f64 {
    v.values.iter().zip(&v.mask).zip(c).filter(|((_, &m), _)| m).map(|((x, _), y)| (x - y) * (x - y)).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodebookNode {
    pub parent: Option<usize>,
    /// Index into `Codebook::centroids` for leaves.
    pub leaf: Option<usize>,
    pub sse: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub dim: usize,
    pub centroids: Vec<Vec<f64>>,
    /// Split hierarchy in creation order; empty for codebooks read from disk.
    pub tree: Vec<CodebookNode>,
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.centroids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centroids.is_empty()
    }

    /// Total within-cluster SSE of `data` under nearest-centroid assignment.
    pub fn sse(&self, data: &[PoseVector]) -> f64 {
        data.iter().map(|v| masked_sq_dist(v, &self.centroids[self.index(v)])).sum()
    }

    /// Nearest centroid, ties to the lowest index.
    pub fn index(&self, v: &PoseVector) -> usize {
        let mut best = (0, f64::INFINITY);
        for (i, c) in self.centroids.iter().enumerate() {
            let d = masked_sq_dist(v, c);
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }
}

pub fn codebook_index(codebook: &Codebook, v: &PoseVector) -> Result<usize> {
    if v.dim() != codebook.dim {
        return Err(Error::Schema(format!("pose dimension {} vs codebook {}", v.dim(), codebook.dim)));
    }
    Ok(codebook.index(v))
}

fn centroid(data: &[PoseVector], members: &[usize], dim: usize) -> Vec<f64> {
    let mut sum = vec![0.0; dim];
    let mut count = vec![0usize; dim];
    for &i in members {
        for (k, (&x, &m)) in data[i].values.iter().zip(&data[i].mask).enumerate() {
            if m {
                sum[k] += x;
                count[k] += 1;
            }
        }
    }
    sum.iter().zip(&count).map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 }).collect()
}

fn cluster_sse(data: &[PoseVector], members: &[usize], c: &[f64]) -> f64 {
    members.iter().map(|&i| masked_sq_dist(&data[i], c)).sum()
}

/// Two-means split of one cluster. Starts from the cluster mean and a
/// distance-weighted random member, so the first assignment already costs no
/// more than the unsplit cluster and Lloyd steps only lower it further.
fn bisect(data: &[PoseVector], members: &[usize], dim: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>) {
    let mean = centroid(data, members, dim);
    let weights: Vec<f64> = members.iter().map(|&i| masked_sq_dist(&data[i], &mean)).collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        // All members coincide: any split keeps SSE at zero.
        let half = members.len() / 2;
        return (members[..half].to_vec(), members[half..].to_vec());
    }
    let mut pick = rng.gen::<f64>() * total;
    let mut seed_idx = members[members.len() - 1];
    for (&i, &w) in members.iter().zip(&weights) {
        if pick < w {
            seed_idx = i;
            break;
        }
        pick -= w;
    }
    let mut centers = [mean, data[seed_idx].values.clone()];
    let mut split = (Vec::new(), Vec::new());
    for _ in 0..100 {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for &i in members {
            if masked_sq_dist(&data[i], &centers[0]) <= masked_sq_dist(&data[i], &centers[1]) {
                a.push(i);
            } else {
                b.push(i);
            }
        }
        let changed = (a.as_slice(), b.as_slice()) != (split.0.as_slice(), split.1.as_slice());
        split = (a, b);
        if !changed || split.0.is_empty() || split.1.is_empty() {
            break;
        }
        centers = [centroid(data, &split.0, dim), centroid(data, &split.1, dim)];
    }
    if split.0.is_empty() || split.1.is_empty() {
        // Degenerate geometry: peel off the member farthest from the mean.
        let far =
            members.iter().zip(&weights).fold((members[0], f64::NEG_INFINITY), |acc, (&i, &w)| if w > acc.1 { (i, w) } else { acc }).0;
        let rest = members.iter().copied().filter(|&i| i != far).collect();
        return (rest, vec![far]);
    }
    split
}

/// Bisecting k-means over pose vectors. Deterministic for a given seed.
pub fn build_codebook(data: &[PoseVector], k: usize, seed: u64) -> Result<Codebook> {
    if k == 0 {
        return Err(Error::invalid("codebook size must be positive"));
    }
    if data.len() < k {
        return Err(Error::invalid(format!("{} pose vectors for {k} clusters", data.len())));
    }
    let dim = data[0].dim();
    if data.iter().any(|v| v.dim() != dim) {
        return Err(Error::Schema("pose vectors differ in dimension".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    struct Leaf {
        node: usize,
        members: Vec<usize>,
        center: Vec<f64>,
        sse: f64,
    }
    let all: Vec<usize> = (0..data.len()).collect();
    let center = centroid(data, &all, dim);
    let sse = cluster_sse(data, &all, &center);
    let mut tree = vec![CodebookNode { parent: None, leaf: None, sse, size: all.len() }];
    let mut leaves = vec![Leaf { node: 0, members: all, center, sse }];
    while leaves.len() < k {
        // Largest SSE first, then largest cluster, then oldest.
        let (pos, _) = leaves.iter().enumerate().filter(|(_, l)| l.members.len() > 1).fold(
            (usize::MAX, (f64::NEG_INFINITY, 0usize)),
            |acc, (i, l)| {
                let key = (l.sse, l.members.len());
                if key.0 > acc.1 .0 || (key.0 == acc.1 .0 && key.1 > acc.1 .1) {
                    (i, key)
                } else {
                    acc
                }
            },
        );
        let leaf = leaves.remove(pos);
        let (a, b) = bisect(data, &leaf.members, dim, &mut rng);
        for members in [a, b] {
            let center = centroid(data, &members, dim);
            let sse = cluster_sse(data, &members, &center);
            tree.push(CodebookNode { parent: Some(leaf.node), leaf: None, sse, size: members.len() });
            leaves.insert(pos.min(leaves.len()), Leaf { node: tree.len() - 1, members, center, sse });
        }
    }
    leaves.sort_by_key(|l| l.node);
    let mut centroids = Vec::with_capacity(k);
    for (i, l) in leaves.into_iter().enumerate() {
        tree[l.node].leaf = Some(i);
        centroids.push(l.center);
    }
    Ok(Codebook { dim, centroids, tree })
}

/// `codebook <k> <dim>` followed by one centroid per line.
pub fn render_codebook(cb: &Codebook) -> String {
    let mut out = format!("codebook {} {}\n", cb.len(), cb.dim);
    for c in &cb.centroids {
        let line: Vec<String> = c.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

pub fn parse_codebook(input: &str) -> Result<Codebook> {
    let mut lines = input.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty codebook"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 3 || h[0] != "codebook" {
        return Err(Error::parse(1, "expected 'codebook <k> <dim>'"));
    }
    let k: usize = h[1].parse().map_err(|_| Error::parse(1, "bad k"))?;
    let dim: usize = h[2].parse().map_err(|_| Error::parse(1, "bad dim"))?;
    let mut centroids = Vec::with_capacity(k);
    for (i, line) in lines {
        let c = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| Error::parse(i + 1, format!("bad number '{t}'"))))
            .collect::<Result<Vec<f64>>>()?;
        if c.len() != dim {
            return Err(Error::parse(i + 1, format!("expected {dim} values")));
        }
        centroids.push(c);
    }
    if centroids.len() != k {
        return Err(Error::Structure(format!("codebook declares {k} centroids, found {}", centroids.len())));
    }
    Ok(Codebook { dim, centroids, tree: Vec::new() })
}
