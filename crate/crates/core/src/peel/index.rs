use crate::geometry::Polytope;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

/// Uniform grid over padded ambient bounding boxes, used to find the pieces
/// containing a query point. Cells are keyed by a hash of their integer
/// coordinates; collisions only add candidates, which the box test removes.
pub(crate) struct PieceIndex {
    cell: f64,
    boxes: Vec<(Vec<f64>, Vec<f64>)>,
    buckets: BTreeMap<u64, Vec<u32>>,
    /// Pieces whose boxes span too many cells; always checked.
    wide: Vec<u32>,
}

const MAX_CELLS: usize = 4096;

fn cell_of(x: f64, cell: f64) -> i64 {
    libm::floor(x / cell) as i64
}

fn hash_cell(c: impl Iterator<Item = i64>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in c {
        h = (h ^ v as u64).wrapping_mul(0x0100_0000_01b3);
        h ^= h >> 29;
    }
    h
}

impl PieceIndex {
    /// `pad` widens every box; queries within `pad` of a piece find it.
    pub fn new(bodies: &[&Polytope], cell: f64, pad: f64) -> Self {
        let mut buckets: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        let mut wide = Vec::new();
        let mut boxes = Vec::with_capacity(bodies.len());
        for (id, b) in bodies.iter().enumerate() {
            let (lo, hi) = b.ambient_bounds();
            let lo: Vec<f64> = lo.iter().map(|x| x - pad).collect();
            let hi: Vec<f64> = hi.iter().map(|x| x + pad).collect();
            let cl: Vec<i64> = lo.iter().map(|&x| cell_of(x, cell)).collect();
            let ch: Vec<i64> = hi.iter().map(|&x| cell_of(x, cell)).collect();
            boxes.push((lo, hi));
            let count = cl
                .iter()
                .zip(&ch)
                .try_fold(1usize, |acc, (a, b)| acc.checked_mul((b - a + 1) as usize))
                .unwrap_or(usize::MAX);
            if count > MAX_CELLS {
                wide.push(id as u32);
                continue;
            }
            let mut cur = cl.clone();
            loop {
                let bucket = buckets.entry(hash_cell(cur.iter().copied())).or_default();
                if bucket.last() != Some(&(id as u32)) {
                    bucket.push(id as u32);
                }
                let mut c = 0;
                while c < cur.len() {
                    cur[c] += 1;
                    if cur[c] <= ch[c] {
                        break;
                    }
                    cur[c] = cl[c];
                    c += 1;
                }
                if c == cur.len() {
                    break;
                }
            }
        }
        Self {
            cell,
            boxes,
            buckets,
            wide,
        }
    }

    fn in_box(&self, i: u32, x: &[f64]) -> bool {
        let (lo, hi) = &self.boxes[i as usize];
        x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| *v >= *a && *v <= *b)
    }

    /// Smallest id `>= from` whose padded box contains `x` and which passes `test`.
    pub fn first(&self, x: &[f64], from: usize, test: impl Fn(usize) -> bool) -> Option<usize> {
        let key = hash_cell(x.iter().map(|&v| cell_of(v, self.cell)));
        let bucket = self.buckets.get(&key).map_or(&[][..], |b| b.as_slice());
        let start = bucket.partition_point(|&i| (i as usize) < from);
        let a = bucket[start..]
            .iter()
            .copied()
            .find(|&i| self.in_box(i, x) && test(i as usize));
        let b = self
            .wide
            .iter()
            .copied()
            .find(|&i| i as usize >= from && a.is_none_or(|a| i < a) && self.in_box(i, x) && test(i as usize));
        match (a, b) {
            (Some(a), Some(b)) => Some(a.min(b) as usize),
            (a, b) => a.or(b).map(|i| i as usize),
        }
    }
}
