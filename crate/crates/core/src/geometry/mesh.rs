//! Structured, optionally graded triangulations of a disk.
//!
//! The mesh is built from concentric rings of nodes. Radial spacing and the
//! per-ring angular node density both follow a target size field, so local
//! refinement near a boundary point is achieved by grading rather than by
//! element splitting. Ring node counts are rounded up to even numbers and
//! placed symmetrically about the axis through the refinement point, which
//! gives meshes a mirror symmetry that the disk diagnostics exploit.

use super::GeometryError;

#[derive(Debug, Clone)]
pub struct Mesh {
    nodes: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<bool>,
    h_max: f64,
    adjacency: Vec<Vec<usize>>,
    locator: CellGrid,
}

/// Uniform background grid for point-in-triangle queries.
#[derive(Debug, Clone)]
struct CellGrid {
    min: [f64; 2],
    cell: f64,
    nx: usize,
    ny: usize,
    bins: Vec<Vec<u32>>,
}

impl CellGrid {
    fn build(nodes: &[[f64; 2]], triangles: &[[usize; 3]]) -> CellGrid {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for p in nodes {
            for k in 0..2 {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        let span = ((max[0] - min[0]).max(max[1] - min[1])).max(1e-12);
        let target_cells = (triangles.len() as f64).sqrt().ceil().max(4.0) as usize;
        let cell = span / target_cells as f64;
        let nx = ((max[0] - min[0]) / cell).ceil() as usize + 1;
        let ny = ((max[1] - min[1]) / cell).ceil() as usize + 1;
        let mut bins = vec![Vec::new(); nx * ny];
        for (ti, tri) in triangles.iter().enumerate() {
            let xs = tri.map(|v| nodes[v][0]);
            let ys = tri.map(|v| nodes[v][1]);
            let lo = [
                xs.iter().cloned().fold(f64::INFINITY, f64::min),
                ys.iter().cloned().fold(f64::INFINITY, f64::min),
            ];
            let hi = [
                xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            ];
            let i0 = (((lo[0] - min[0]) / cell).floor() as isize).clamp(0, nx as isize - 1) as usize;
            let i1 = (((hi[0] - min[0]) / cell).floor() as isize).clamp(0, nx as isize - 1) as usize;
            let j0 = (((lo[1] - min[1]) / cell).floor() as isize).clamp(0, ny as isize - 1) as usize;
            let j1 = (((hi[1] - min[1]) / cell).floor() as isize).clamp(0, ny as isize - 1) as usize;
            for j in j0..=j1 {
                for i in i0..=i1 {
                    bins[j * nx + i].push(ti as u32);
                }
            }
        }
        CellGrid { min, cell, nx, ny, bins }
    }

    fn candidates(&self, p: [f64; 2], spread: isize) -> impl Iterator<Item = u32> + '_ {
        let ci = ((p[0] - self.min[0]) / self.cell).floor() as isize;
        let cj = ((p[1] - self.min[1]) / self.cell).floor() as isize;
        let nx = self.nx as isize;
        let ny = self.ny as isize;
        (-spread..=spread).flat_map(move |dj| {
            (-spread..=spread).flat_map(move |di| {
                let i = ci + di;
                let j = cj + dj;
                if i >= 0 && i < nx && j >= 0 && j < ny {
                    self.bins[(j * nx + i) as usize].iter().copied()
                } else {
                    [].iter().copied()
                }
            })
        })
    }
}

impl Mesh {
    pub(crate) fn from_parts(
        nodes: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<bool>,
    ) -> Result<Mesh, GeometryError> {
        assert_eq!(nodes.len(), boundary.len());
        let mut tris = triangles;
        let mut h_max: f64 = 0.0;
        for (i, tri) in tris.iter_mut().enumerate() {
            let area2 = signed_area2(&nodes, *tri);
            if area2 < 0.0 {
                tri.swap(1, 2);
            }
            let area2 = signed_area2(&nodes, *tri);
            if area2 <= 1e-14 {
                return Err(GeometryError::DegenerateTriangle(i, 0.5 * area2));
            }
            for e in 0..3 {
                let a = nodes[tri[e]];
                let b = nodes[tri[(e + 1) % 3]];
                h_max = h_max.max((a[0] - b[0]).hypot(a[1] - b[1]));
            }
        }
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for tri in &tris {
            for e in 0..3 {
                let a = tri[e];
                let b = tri[(e + 1) % 3];
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
            nbrs.dedup();
        }
        let locator = CellGrid::build(&nodes, &tris);
        Ok(Mesh { nodes, triangles: tris, boundary, h_max, adjacency, locator })
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.boundary[node]
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.boundary[i]).collect()
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Sorted mesh neighbors of each node.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        0.5 * signed_area2(&self.nodes, self.triangles[t])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Triangle containing p together with its barycentric coordinates,
    /// or None when p lies outside the triangulation.
    pub fn locate(&self, p: [f64; 2]) -> Option<(usize, [f64; 3])> {
        for spread in [0_isize, 1] {
            for ti in self.locator.candidates(p, spread) {
                let bary = self.barycentric(ti as usize, p);
                if bary.iter().all(|&b| b >= -1e-12) {
                    return Some((ti as usize, bary));
                }
            }
        }
        None
    }

    /// Like `locate`, but falls back to the nearest candidate triangle with
    /// clamped barycentric coordinates for points marginally outside the
    /// mesh polygon (e.g. rotated boundary nodes).
    pub fn locate_clamped(&self, p: [f64; 2]) -> (usize, [f64; 3]) {
        if let Some(hit) = self.locate(p) {
            return hit;
        }
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for spread in [2_isize, 4, 16] {
            for ti in self.locator.candidates(p, spread) {
                let bary = self.barycentric(ti as usize, p);
                let worst = bary.iter().cloned().fold(f64::INFINITY, f64::min);
                if best.map_or(true, |(_, _, w)| worst > w) {
                    best = Some((ti as usize, bary, worst));
                }
            }
            if let Some((_, _, w)) = best {
                if w > -0.5 {
                    break;
                }
            }
        }
        if best.is_none() {
            // point far outside the triangulation: scan everything
            for ti in 0..self.triangles.len() {
                let bary = self.barycentric(ti, p);
                let worst = bary.iter().cloned().fold(f64::INFINITY, f64::min);
                if best.map_or(true, |(_, _, w)| worst > w) {
                    best = Some((ti, bary, worst));
                }
            }
        }
        let (ti, bary, _) = best.expect("mesh has at least one triangle");
        let mut clamped = bary.map(|b| b.max(0.0));
        let sum: f64 = clamped.iter().sum();
        for b in &mut clamped {
            *b /= sum;
        }
        (ti, clamped)
    }

    fn barycentric(&self, t: usize, p: [f64; 2]) -> [f64; 3] {
        let [a, b, c] = self.triangles[t].map(|v| self.nodes[v]);
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let l1 = ((b[0] - p[0]) * (c[1] - p[1]) - (c[0] - p[0]) * (b[1] - p[1])) / det;
        let l2 = ((c[0] - p[0]) * (a[1] - p[1]) - (a[0] - p[0]) * (c[1] - p[1])) / det;
        [l1, l2, 1.0 - l1 - l2]
    }

    /// Longest edge among triangles that have at least one vertex within
    /// `dist` of `center`.
    pub fn max_edge_near(&self, center: [f64; 2], dist: f64) -> f64 {
        let mut h: f64 = 0.0;
        for tri in &self.triangles {
            let near = tri.iter().any(|&v| {
                let p = self.nodes[v];
                (p[0] - center[0]).hypot(p[1] - center[1]) <= dist
            });
            if !near {
                continue;
            }
            for e in 0..3 {
                let a = self.nodes[tri[e]];
                let b = self.nodes[tri[(e + 1) % 3]];
                h = h.max((a[0] - b[0]).hypot(a[1] - b[1]));
            }
        }
        h
    }

    pub fn min_edge_near(&self, center: [f64; 2], dist: f64) -> f64 {
        let mut h: f64 = f64::INFINITY;
        for tri in &self.triangles {
            let near = tri.iter().any(|&v| {
                let p = self.nodes[v];
                (p[0] - center[0]).hypot(p[1] - center[1]) <= dist
            });
            if !near {
                continue;
            }
            for e in 0..3 {
                let a = self.nodes[tri[e]];
                let b = self.nodes[tri[(e + 1) % 3]];
                h = h.min((a[0] - b[0]).hypot(a[1] - b[1]));
            }
        }
        h
    }
}

fn signed_area2(nodes: &[[f64; 2]], tri: [usize; 3]) -> f64 {
    let [a, b, c] = tri.map(|v| nodes[v]);
    (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])
}

/// Node spacing is this fraction of the local target element size, so that
/// ring diagonals stay below the target.
const SPACING_FACTOR: f64 = 0.7;
/// Minimum boundary node count; keeps the polygonal area defect below 0.5%.
const MIN_BOUNDARY_NODES: usize = 40;
const DENSITY_SAMPLES: usize = 8192;

/// Build a triangulation of the disk of given radius with target element
/// size `h_target`. When `refine` = (point, levels) is given, elements
/// within distance 10·h_target of the point are graded down to
/// h_target / 2^levels, and the node layout is symmetric about the axis
/// through the point.
pub fn build_disk_mesh(
    radius: f64,
    h_target: f64,
    refine: Option<([f64; 2], u32)>,
) -> Result<Mesh, GeometryError> {
    if !(radius > 0.0) || !(h_target > 0.0) {
        return Err(GeometryError::InvalidResolution(
            "radius and h_target must be positive".into(),
        ));
    }
    if h_target > radius {
        return Err(GeometryError::InvalidResolution(format!(
            "h_target {h_target} exceeds the disk radius {radius}"
        )));
    }
    if let Some((p, levels)) = refine {
        if levels > 12 {
            return Err(GeometryError::InvalidResolution(
                "refine_levels > 12 is not supported".into(),
            ));
        }
        let pr = p[0].hypot(p[1]);
        if pr > radius * (1.0 + 1e-9) {
            return Err(GeometryError::InvalidResolution(
                "refine point lies outside the disk".into(),
            ));
        }
    }

    let (refine_point, h_fine, zone) = match refine {
        Some((p, levels)) => (Some(p), h_target / (1u32 << levels) as f64, 10.0 * h_target),
        None => (None, h_target, 0.0),
    };
    // target element size at a point
    let size_at = |x: [f64; 2]| -> f64 {
        match refine_point {
            None => h_target,
            Some(p) => {
                let dist = (x[0] - p[0]).hypot(x[1] - p[1]);
                if dist <= zone {
                    h_fine
                } else {
                    (h_fine + 0.5 * (dist - zone)).min(h_target)
                }
            }
        }
    };
    // smallest target size anywhere on the circle of radius r
    let size_on_circle = |r: f64| -> f64 {
        match refine_point {
            None => h_target,
            Some(p) => {
                let pr = p[0].hypot(p[1]);
                let gap = (r - pr).abs();
                if gap <= zone {
                    h_fine
                } else {
                    (h_fine + 0.5 * (gap - zone)).min(h_target)
                }
            }
        }
    };

    let theta0 = match refine_point {
        Some(p) if p[0] != 0.0 || p[1] != 0.0 => p[1].atan2(p[0]) - std::f64::consts::PI,
        _ => -std::f64::consts::PI,
    };

    // radii from the boundary inward
    let mut radii = vec![radius];
    let mut r = radius;
    loop {
        let dr = SPACING_FACTOR * size_on_circle(r);
        if r <= 1.45 * dr {
            break;
        }
        r -= dr;
        radii.push(r);
    }
    radii.reverse(); // innermost first

    let mut nodes: Vec<[f64; 2]> = vec![[0.0, 0.0]];
    let mut boundary = vec![false];
    let mut rings: Vec<Vec<usize>> = Vec::with_capacity(radii.len());
    let mut ring_angles: Vec<Vec<f64>> = Vec::with_capacity(radii.len());

    for (ri, &rr) in radii.iter().enumerate() {
        let is_boundary_ring = ri + 1 == radii.len();
        // angular density 1/spacing integrated around the circle
        let mut cum = vec![0.0_f64; DENSITY_SAMPLES + 1];
        let dth = 2.0 * std::f64::consts::PI / DENSITY_SAMPLES as f64;
        for i in 0..DENSITY_SAMPLES {
            let th = theta0 + (i as f64 + 0.5) * dth;
            let x = [rr * th.cos(), rr * th.sin()];
            let density = rr / (SPACING_FACTOR * size_at(x));
            cum[i + 1] = cum[i] + density * dth;
        }
        let total = cum[DENSITY_SAMPLES];
        let mut n = (total.ceil() as usize).max(8);
        n = (n + 3) / 4 * 4; // multiple of 4: symmetric and C4-compatible
        if is_boundary_ring {
            n = n.max(MIN_BOUNDARY_NODES);
        }
        let mut ring = Vec::with_capacity(n);
        let mut angles = Vec::with_capacity(n);
        let mut seg = 0usize;
        for k in 0..n {
            let target = total * k as f64 / n as f64;
            while seg + 1 < cum.len() - 1 && cum[seg + 1] < target {
                seg += 1;
            }
            let span = cum[seg + 1] - cum[seg];
            let frac = if span > 0.0 { (target - cum[seg]) / span } else { 0.0 };
            let th = theta0 + (seg as f64 + frac) * dth;
            angles.push(th);
            ring.push(nodes.len());
            nodes.push([rr * th.cos(), rr * th.sin()]);
            boundary.push(is_boundary_ring);
        }
        rings.push(ring);
        ring_angles.push(angles);
    }

    let mut triangles: Vec<[usize; 3]> = Vec::new();
    // center fan
    let first = &rings[0];
    for k in 0..first.len() {
        triangles.push([0, first[k], first[(k + 1) % first.len()]]);
    }
    // stitch consecutive rings with a two-pointer walk over angles
    for ri in 0..rings.len() - 1 {
        let (inner, outer) = (&rings[ri], &rings[ri + 1]);
        let (ia, oa) = (&ring_angles[ri], &ring_angles[ri + 1]);
        let n_in = inner.len();
        let n_out = outer.len();
        let angle_at = |angles: &[f64], idx: usize| -> f64 {
            angles[idx % angles.len()] + 2.0 * std::f64::consts::PI * (idx / angles.len()) as f64
        };
        let (mut i, mut j) = (0usize, 0usize);
        while i < n_in || j < n_out {
            let next_inner = angle_at(ia, i + 1);
            let next_outer = angle_at(oa, j + 1);
            if j < n_out && (i == n_in || next_outer <= next_inner) {
                triangles.push([inner[i % n_in], outer[j % n_out], outer[(j + 1) % n_out]]);
                j += 1;
            } else {
                triangles.push([inner[i % n_in], inner[(i + 1) % n_in], outer[j % n_out]]);
                i += 1;
            }
        }
    }

    Mesh::from_parts(nodes, triangles, boundary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_disk_area_within_two_percent() {
        let m = build_disk_mesh(1.0, 0.5, None).unwrap();
        let area = m.total_area();
        assert!(
            (area - std::f64::consts::PI).abs() < 0.02 * std::f64::consts::PI,
            "area {area}"
        );
    }

    #[test]
    fn medium_disk_area_within_fifth_of_percent() {
        let m = build_disk_mesh(1.0, 0.1, None).unwrap();
        let area = m.total_area();
        // polygonal-area oracle: the mesh area is the sum of triangle areas,
        // an inscribed polygon of the disk
        assert!(
            (area - std::f64::consts::PI).abs() < 0.002 * std::f64::consts::PI,
            "area {area}"
        );
        assert!(area < std::f64::consts::PI);
    }

    #[test]
    fn refined_mesh_has_small_edges_near_point() {
        let m = build_disk_mesh(1.0, 0.05, Some(([0.0, -1.0], 3))).unwrap();
        let min_edge = m.min_edge_near([0.0, -1.0], 0.05);
        assert!(min_edge <= 0.05 / 8.0, "min edge {min_edge}");
        // the refinement post-condition: local h within the zone
        let local_h = m.max_edge_near([0.0, -1.0], 0.2);
        assert!(local_h <= 0.05 / 8.0 * 1.05, "local h {local_h}");
    }

    #[test]
    fn invalid_resolution_rejected() {
        assert!(matches!(
            build_disk_mesh(1.0, 2.0, None),
            Err(GeometryError::InvalidResolution(_))
        ));
        assert!(build_disk_mesh(1.0, 0.0, None).is_err());
    }

    #[test]
    fn triangles_positive_and_nodes_distinct() {
        let m = build_disk_mesh(1.0, 0.2, Some(([0.0, 1.0], 1))).unwrap();
        for t in 0..m.triangles().len() {
            assert!(m.triangle_area(t) > 0.0);
        }
        let mut seen = std::collections::BTreeSet::new();
        for p in m.nodes() {
            let key = ((p[0] / 1e-12).round() as i64, (p[1] / 1e-12).round() as i64);
            assert!(seen.insert(key), "duplicate node at {p:?}");
        }
    }

    #[test]
    fn boundary_nodes_on_circle() {
        let m = build_disk_mesh(1.0, 0.3, None).unwrap();
        assert!(!m.boundary_nodes().is_empty());
        for &b in &m.boundary_nodes() {
            let p = m.nodes()[b];
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-8 * m.h_max());
        }
        // interior nodes are not flagged
        assert!(!m.is_boundary(0));
    }

    #[test]
    fn refine_point_is_a_node_and_mesh_mirror_symmetric() {
        let m = build_disk_mesh(1.0, 0.1, Some(([0.0, 1.0], 1))).unwrap();
        let has = m
            .nodes()
            .iter()
            .any(|p| (p[0]).abs() < 1e-12 && (p[1] - 1.0).abs() < 1e-12);
        assert!(has, "refine point should be a mesh node");
        // mirror symmetry about the x2-axis: every node has a reflected twin
        for p in m.nodes() {
            let refl = [-p[0], p[1]];
            let found = m
                .nodes()
                .iter()
                .any(|q| (q[0] - refl[0]).hypot(q[1] - refl[1]) < 1e-9);
            assert!(found, "no mirror twin for {p:?}");
        }
    }

    #[test]
    fn locate_finds_containing_triangle() {
        let m = build_disk_mesh(1.0, 0.2, None).unwrap();
        let pts = crate::numerics::uniform_samples(3, 200, -0.7, 0.7);
        for pair in pts.chunks(2) {
            let p = [pair[0], pair[1]];
            let (t, bary) = m.locate(p).expect("interior point must be located");
            let [a, b, c] = m.triangles()[t].map(|v| m.nodes()[v]);
            let x = bary[0] * a[0] + bary[1] * b[0] + bary[2] * c[0];
            let y = bary[0] * a[1] + bary[1] * b[1] + bary[2] * c[1];
            assert!((x - p[0]).hypot(y - p[1]) < 1e-10);
        }
        // clamped lookup handles points just outside the polygon
        let (_, bary) = m.locate_clamped([0.0, 1.0 + 1e-6]);
        assert!(bary.iter().all(|&b| (0.0..=1.0).contains(&b)));
    }
}
