//! Cubical grids with forbidden top cells.

use super::{CellInventory, PrecubicalSet};
use crate::error::{Error, Result};

/// A grid of `extents[k]` unit cells along axis `k`, minus some top cells.
///
/// A lower cell survives when at least one allowed top cell contains it,
/// so the boundary of a hole stays traversable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridPospace {
    pub extents: Vec<usize>,
    pub forbidden: Vec<Vec<usize>>,
}

pub fn grid_vertex_name(coords: &[usize]) -> String {
    cell_name(coords, &[])
}

fn cell_name(base: &[usize], axes: &[usize]) -> String {
    let prefix = ["v", "e", "s", "c"][axes.len()];
    let coords: Vec<String> = base.iter().map(usize::to_string).collect();
    let mut name = format!("{prefix}{}", coords.join("_"));
    if !axes.is_empty() {
        name.push('+');
        for a in axes {
            name.push_str(&a.to_string());
        }
    }
    name
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == k {
            out.push((0..n).filter(|i| mask & (1 << i) != 0).collect());
        }
    }
    out.sort();
    out
}

/// All points of the box `0..bounds[k]`, in lexicographic order.
fn box_points(bounds: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &b in bounds {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..b).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

impl GridPospace {
    pub fn new(extents: Vec<usize>, forbidden: Vec<Vec<usize>>) -> Self {
        GridPospace { extents, forbidden }
    }

    pub fn check(&self) -> Result<()> {
        let n = self.extents.len();
        if !(2..=3).contains(&n) {
            return Err(Error::Precondition(format!("a grid needs 2 or 3 axes, got {n}")));
        }
        if self.extents.contains(&0) {
            return Err(Error::Precondition("grid extents must be positive".into()));
        }
        for f in &self.forbidden {
            if f.len() != n || f.iter().zip(&self.extents).any(|(x, e)| x >= e) {
                return Err(Error::Precondition(format!("forbidden cell {f:?} lies outside the grid")));
            }
        }
        Ok(())
    }

    fn allowed_top(&self, t: &[usize]) -> bool {
        t.iter().zip(&self.extents).all(|(x, e)| x < e) && !self.forbidden.iter().any(|f| f == t)
    }

    fn kept(&self, base: &[usize], axes: &[usize]) -> bool {
        // try every top cell containing the given one
        let free: Vec<usize> = (0..self.extents.len()).filter(|k| !axes.contains(k)).collect();
        (0u32..(1 << free.len())).any(|mask| {
            let mut t = base.to_vec();
            for (bit, &k) in free.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    if t[k] == 0 {
                        return false;
                    }
                    t[k] -= 1;
                }
            }
            self.allowed_top(&t)
        })
    }

    pub fn inventory(&self) -> Result<CellInventory> {
        self.check()?;
        let n = self.extents.len();
        let mut inv = CellInventory::default();
        for d in 0..=n {
            for axes in subsets_of_size(n, d) {
                let bounds: Vec<usize> =
                    (0..n).map(|k| if axes.contains(&k) { self.extents[k] } else { self.extents[k] + 1 }).collect();
                for base in box_points(&bounds) {
                    if !self.kept(&base, &axes) {
                        continue;
                    }
                    let mut faces = Vec::new();
                    for i in 0..axes.len() {
                        for s in 0..2 {
                            let mut fb = base.clone();
                            fb[axes[i]] += s;
                            let mut fa = axes.clone();
                            fa.remove(i);
                            faces.push(cell_name(&fb, &fa));
                        }
                    }
                    inv.add(d, cell_name(&base, &axes), faces);
                }
            }
            // lexicographic by base point, then by axis set
            if let Some(cells) = inv.cells.get_mut(d) {
                cells.sort_by_key(|(name, _)| sort_key(name));
            }
        }
        Ok(inv)
    }

    pub fn build(&self) -> Result<PrecubicalSet> {
        PrecubicalSet::new(&self.inventory()?)
    }
}

fn sort_key(name: &str) -> (Vec<usize>, String) {
    let body = &name[1..];
    let (coords, axes) = body.split_once('+').unwrap_or((body, ""));
    (coords.split('_').map(|c| c.parse().unwrap()).collect(), axes.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square() {
        let x = GridPospace::new(vec![1, 1], vec![]).build().unwrap();
        assert_eq!((x.count(0), x.count(1), x.count(2)), (4, 4, 1));
        assert_eq!(x.names(1), ["e0_0+0", "e0_0+1", "e0_1+0", "e1_0+1"]);
        let s = 0;
        let (b, r) = x.lower_corner(s);
        let (l, t) = x.upper_corner(s);
        let name = |e| x.name(1, e).to_string();
        assert_eq!((name(b), name(r)), ("e0_0+0".into(), "e1_0+1".into()));
        assert_eq!((name(l), name(t)), ("e0_0+1".into(), "e0_1+0".into()));
    }

    #[test]
    fn hole_keeps_its_boundary() {
        let x = GridPospace::new(vec![3, 3], vec![vec![1, 1]]).build().unwrap();
        assert_eq!(x.count(0), 16);
        assert_eq!(x.count(1), 24);
        assert_eq!(x.count(2), 8);
    }

    #[test]
    fn isolated_corner_removed() {
        // the only square is forbidden, so nothing survives
        let x = GridPospace::new(vec![1, 1], vec![vec![0, 0]]).build().unwrap();
        assert_eq!(x.count(0), 0);
    }

    #[test]
    fn cube_grid_validates() {
        let x = GridPospace::new(vec![2, 1, 1], vec![vec![1, 0, 0]]).build().unwrap();
        assert_eq!(x.count(3), 1);
        assert!(x.validate().is_valid());
    }

    #[test]
    fn out_of_range_forbidden_cell() {
        assert!(GridPospace::new(vec![2, 2], vec![vec![2, 0]]).build().is_err());
        assert!(GridPospace::new(vec![2], vec![]).build().is_err());
    }
}
