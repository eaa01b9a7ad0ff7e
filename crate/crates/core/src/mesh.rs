//! Polygonal domains with one re-entrant corner at the origin, structured
//! quasi-uniform triangulations and the barycentric (Alfeld) split.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Minimum interior angle accepted for a macro triangulation (degrees).
pub const MIN_ANGLE_DEG: f64 = 20.0;
/// Maximum ratio of largest to smallest element diameter.
pub const MAX_DIAMETER_RATIO: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainKind {
    /// Rectangle (-1,1)x(0,1); the origin sits on a straight edge.
    Omega0,
    /// L-shaped domain, corner angle 3pi/2.
    Omega1,
    /// Corner angle 5pi/4.
    Omega2,
    /// Corner angle 9pi/8.
    Omega3,
    /// Rectangle plus a fan below the negative x1 axis with the given corner angle.
    Angle(f64),
}

impl DomainKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "omega0" | "0" => Some(Self::Omega0),
            "omega1" | "1" => Some(Self::Omega1),
            "omega2" | "2" => Some(Self::Omega2),
            "omega3" | "3" => Some(Self::Omega3),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Omega0 => "omega0".into(),
            Self::Omega1 => "omega1".into(),
            Self::Omega2 => "omega2".into(),
            Self::Omega3 => "omega3".into(),
            Self::Angle(w) => format!("angle:{w:.17e}"),
        }
    }

    /// Interior angle at the origin.
    pub fn omega(&self) -> f64 {
        match self {
            Self::Omega0 => PI,
            Self::Omega1 => 1.5 * PI,
            Self::Omega2 => 1.25 * PI,
            Self::Omega3 => 1.125 * PI,
            Self::Angle(w) => *w,
        }
    }
}

/// A polygon with the corner vertex at the origin, together with a coarse
/// conforming triangulation used to seed structured meshes.
#[derive(Debug, Clone)]
pub struct DomainSpec {
    pub kind: DomainKind,
    /// Counterclockwise polygon; `vertices[corner]` is the origin.
    pub vertices: Vec<Point>,
    pub omega: f64,
    pub corner: usize,
    coarse_points: Vec<Point>,
    coarse_triangles: Vec<[usize; 3]>,
}

impl DomainSpec {
    pub fn area(&self) -> f64 {
        polygon_area(&self.vertices)
    }

    /// Interior angle of the polygon at vertex `i`.
    pub fn interior_angle(&self, i: usize) -> f64 {
        let n = self.vertices.len();
        let p = self.vertices[i];
        let next = self.vertices[(i + 1) % n];
        let prev = self.vertices[(i + n - 1) % n];
        let a_next = (next[1] - p[1]).atan2(next[0] - p[0]);
        let a_prev = (prev[1] - p[1]).atan2(prev[0] - p[0]);
        (a_prev - a_next).rem_euclid(2.0 * PI)
    }

    /// Index of the polygon edge containing `p` (edge `i` joins vertex `i` and `i+1`).
    pub fn edge_containing(&self, p: Point, tol: f64) -> Option<usize> {
        let n = self.vertices.len();
        (0..n).find(|&i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            point_segment_distance(p, a, b) <= tol
        })
    }

    pub fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
                let (c, d) = (self.vertices[j], self.vertices[(j + 1) % n]);
                if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }
}

/// Builds one of the reference domains, or a corner domain with an explicit angle.
///
/// The region below the negative x1 axis is a fan of triangles from the origin
/// whose outer vertices sit on the boundary of the square [-1,1]^2 at equally
/// spaced angles of at most pi/4. For the three named corner domains the fan
/// reproduces the polygons exactly; `Omega3` uses the exact angle 9pi/8.
pub fn build_domain(kind: DomainKind) -> Result<DomainSpec> {
    let omega = kind.omega();
    if let DomainKind::Angle(w) = kind {
        if !(w > PI && w < 2.0 * PI) {
            return Err(Error::InvalidInput(format!(
                "corner angle {w} outside the open interval (pi, 2pi)"
            )));
        }
    }

    let mut pts: Vec<Point> = vec![
        [0.0, 0.0],
        [1.0, 0.0],
        [1.0, 1.0],
        [0.0, 1.0],
        [-1.0, 1.0],
        [-1.0, 0.0],
    ];
    let mut tris: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5]];
    let mut polygon = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [-1.0, 1.0]];

    if matches!(kind, DomainKind::Omega0) {
        polygon.push([-1.0, 0.0]);
    } else {
        let wedge = omega - PI;
        let sectors = ((wedge / FRAC_PI_4) - 1e-9).ceil().max(1.0) as usize;
        let mut prev = 5;
        let mut fan = Vec::with_capacity(sectors);
        for k in 1..=sectors {
            let angle = PI + wedge * k as f64 / sectors as f64;
            let p = if matches!(kind, DomainKind::Omega3) && k == sectors {
                // tan(pi/8) = sqrt(2) - 1 exactly
                [-1.0, 1.0 - std::f64::consts::SQRT_2]
            } else {
                square_boundary_point(angle)
            };
            pts.push(p);
            let idx = pts.len() - 1;
            tris.push([0, prev, idx]);
            prev = idx;
            fan.push(p);
        }
        // Polygon corners: skip fan points that are collinear with their neighbours.
        let mut chain = vec![[-1.0, 1.0], [-1.0, 0.0]];
        chain.extend(fan.iter().copied());
        chain.push([0.0, 0.0]);
        for w in chain.windows(3) {
            if cross(sub(w[1], w[0]), sub(w[2], w[1])).abs() > 1e-14 {
                polygon.push(w[1]);
            }
        }
    }

    // Rotate so the origin is vertex 0 (it already is) and check the angle.
    let spec = DomainSpec {
        kind,
        vertices: polygon,
        omega,
        corner: 0,
        coarse_points: pts,
        coarse_triangles: tris,
    };
    let measured = spec.interior_angle(0);
    if (measured - omega).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "constructed corner angle {measured} differs from requested {omega}"
        )));
    }
    Ok(spec)
}

fn square_boundary_point(angle: f64) -> Point {
    let (s, c) = angle.sin_cos();
    let t = 1.0 / c.abs().max(s.abs());
    let mut p = [c * t, s * t];
    for v in &mut p {
        if (v.abs() - 1.0).abs() < 1e-14 {
            *v = v.signum();
        }
        if v.abs() < 1e-15 {
            *v = 0.0;
        }
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    /// Endpoints, ordered counterclockwise along the domain boundary.
    pub v: [usize; 2],
    /// Polygon edge index the mesh edge lies on.
    pub side: usize,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    /// Positively oriented triangles.
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<BoundaryEdge>,
    /// Nominal mesh size the triangulation was built for.
    pub h: f64,
    /// For a split mesh: children of each macro triangle, `children[m][2]` etc.
    pub macro_children: Option<Vec<[usize; 3]>>,
    /// Centroid vertex of each macro triangle (split meshes only).
    pub macro_centroids: Option<Vec<usize>>,
}

impl Mesh {
    pub fn is_split(&self) -> bool {
        self.macro_children.is_some()
    }

    pub fn coords(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.coords(t);
        0.5 * cross(sub(b, a), sub(c, a))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.area(t)).sum()
    }

    pub fn diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.coords(t);
        dist(a, b).max(dist(b, c)).max(dist(c, a))
    }

    /// Interior angles of triangle `t` in radians.
    pub fn angles(&self, t: usize) -> [f64; 3] {
        let p = self.coords(t);
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            let u = sub(p[(i + 1) % 3], p[i]);
            let v = sub(p[(i + 2) % 3], p[i]);
            *o = cross(u, v).abs().atan2(dot(u, v));
        }
        out
    }

    /// Sorted edge list together with the incident triangles of each edge.
    pub fn edges(&self) -> Vec<([usize; 2], Vec<usize>)> {
        let mut map: BTreeMap<[usize; 2], Vec<usize>> = BTreeMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for i in 0..3 {
                let (a, b) = (tri[i], tri[(i + 1) % 3]);
                map.entry([a.min(b), a.max(b)]).or_default().push(t);
            }
        }
        map.into_iter().collect()
    }

    /// Checks conformity, orientation and (for unsplit meshes) the quality bounds.
    pub fn validate(&self) -> Result<()> {
        for (t, _) in self.triangles.iter().enumerate() {
            if !(self.area(t) > 0.0) {
                return Err(Error::Mesh(format!("triangle {t} has non-positive area")));
            }
        }
        let mut boundary_count = 0;
        for (e, inc) in self.edges() {
            match inc.len() {
                1 => boundary_count += 1,
                2 => {}
                k => {
                    return Err(Error::Mesh(format!(
                        "edge {e:?} shared by {k} triangles"
                    )))
                }
            }
        }
        if boundary_count != self.boundary.len() {
            return Err(Error::Mesh(format!(
                "{boundary_count} boundary edges found, {} recorded",
                self.boundary.len()
            )));
        }
        if let Some(children) = &self.macro_children {
            let cents = self.macro_centroids.as_ref().ok_or_else(|| {
                Error::Mesh("split mesh without centroid table".into())
            })?;
            for (m, ch) in children.iter().enumerate() {
                if !ch.iter().all(|&c| self.triangles[c].contains(&cents[m])) {
                    return Err(Error::Mesh(format!(
                        "macro triangle {m} children do not share its centroid"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Plain-text export: `nv nt nb`, vertices, triangles, boundary edges.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "{} {} {}",
            self.vertices.len(),
            self.triangles.len(),
            self.boundary.len()
        )?;
        for p in &self.vertices {
            writeln!(w, "{:.16e} {:.16e}", p[0], p[1])?;
        }
        for t in &self.triangles {
            writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
        }
        for b in &self.boundary {
            writeln!(w, "{} {} {}", b.v[0], b.v[1], b.side)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Reads the format produced by [`Mesh::write_text`]. The result is an
    /// unsplit mesh; `h` is set to the largest element diameter.
    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let mut next = || -> Result<Vec<String>> {
            loop {
                let line = lines
                    .next()
                    .ok_or_else(|| Error::Parse("unexpected end of mesh file".into()))??;
                let trimmed = line.trim();
                if !trimmed.is_empty() {
                    return Ok(trimmed.split_whitespace().map(str::to_owned).collect());
                }
            }
        };
        let parse_usize = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad integer {s:?}: {e}")))
        };
        let parse_f64 = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad number {s:?}: {e}")))
        };
        let head = next()?;
        if head.len() != 3 {
            return Err(Error::Parse("header must be `nv nt nb`".into()));
        }
        let (nv, nt, nb) = (
            parse_usize(&head[0])?,
            parse_usize(&head[1])?,
            parse_usize(&head[2])?,
        );
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let f = next()?;
            if f.len() != 2 {
                return Err(Error::Parse("vertex line needs 2 fields".into()));
            }
            vertices.push([parse_f64(&f[0])?, parse_f64(&f[1])?]);
        }
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let f = next()?;
            if f.len() != 3 {
                return Err(Error::Parse("triangle line needs 3 fields".into()));
            }
            let t = [parse_usize(&f[0])?, parse_usize(&f[1])?, parse_usize(&f[2])?];
            if t.iter().any(|&v| v >= nv) {
                return Err(Error::Parse(format!("triangle {t:?} out of range")));
            }
            triangles.push(t);
        }
        let mut boundary = Vec::with_capacity(nb);
        for _ in 0..nb {
            let f = next()?;
            if f.len() != 3 {
                return Err(Error::Parse("boundary line needs 3 fields".into()));
            }
            boundary.push(BoundaryEdge {
                v: [parse_usize(&f[0])?, parse_usize(&f[1])?],
                side: parse_usize(&f[2])?,
            });
        }
        let mut mesh = Mesh {
            vertices,
            triangles,
            boundary,
            h: 0.0,
            macro_children: None,
            macro_centroids: None,
        };
        mesh.h = (0..nt).map(|t| mesh.diameter(t)).fold(0.0, f64::max);
        mesh.validate()?;
        Ok(mesh)
    }
}

/// Structured quasi-uniform triangulation: every coarse triangle of the
/// domain is refined uniformly into `n^2` similar triangles with
/// `n = ceil(1/h)`, so unit-length coarse edges are cut into pieces of length
/// at most `h`. No grading toward the corner.
pub fn triangulate(domain: &DomainSpec, h: f64) -> Result<Mesh> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidInput(format!("mesh size h={h} must be positive")));
    }
    let shortest = (0..domain.vertices.len())
        .map(|i| {
            dist(
                domain.vertices[i],
                domain.vertices[(i + 1) % domain.vertices.len()],
            )
        })
        .fold(f64::INFINITY, f64::min);
    if h > shortest + 1e-12 {
        return Err(Error::InvalidInput(format!(
            "h={h} exceeds the shortest polygon edge {shortest}"
        )));
    }
    let n = ((1.0 / h) - 1e-9).ceil().max(1.0) as usize;

    let cp = &domain.coarse_points;
    let mut points: Vec<Point> = cp.clone();
    // Interior points of each coarse edge, stored from the lower to the higher vertex id.
    let mut edge_points: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for tri in &domain.coarse_triangles {
        for i in 0..3 {
            let (a, b) = (tri[i].min(tri[(i + 1) % 3]), tri[i].max(tri[(i + 1) % 3]));
            edge_points.entry((a, b)).or_insert_with(|| {
                (1..n)
                    .map(|k| {
                        let s = k as f64 / n as f64;
                        points.push(lerp(cp[a], cp[b], s));
                        points.len() - 1
                    })
                    .collect()
            });
        }
    }
    let mut triangles = Vec::with_capacity(domain.coarse_triangles.len() * n * n);
    for tri in &domain.coarse_triangles {
        let [a, b, c] = *tri;
        // lattice index (i, j): point a + i/n (b-a) + j/n (c-a)
        let mut lattice = vec![usize::MAX; (n + 1) * (n + 1)];
        let li = |i: usize, j: usize| i * (n + 1) + j;
        let along = |p: usize, q: usize, k: usize| -> usize {
            // k-th point (0..=n) from p to q
            if k == 0 {
                return p;
            }
            if k == n {
                return q;
            }
            let key = (p.min(q), p.max(q));
            let list = &edge_points[&key];
            if p < q {
                list[k - 1]
            } else {
                list[n - 1 - k]
            }
        };
        for i in 0..=n {
            for j in 0..=(n - i) {
                let idx = if j == 0 {
                    along(a, b, i)
                } else if i == 0 {
                    along(a, c, j)
                } else if i + j == n {
                    along(b, c, j)
                } else {
                    let pa = cp[a];
                    let (u, v) = (i as f64 / n as f64, j as f64 / n as f64);
                    points.push([
                        pa[0] + u * (cp[b][0] - pa[0]) + v * (cp[c][0] - pa[0]),
                        pa[1] + u * (cp[b][1] - pa[1]) + v * (cp[c][1] - pa[1]),
                    ]);
                    points.len() - 1
                };
                lattice[li(i, j)] = idx;
            }
        }
        for i in 0..n {
            for j in 0..(n - i) {
                triangles.push([lattice[li(i, j)], lattice[li(i + 1, j)], lattice[li(i, j + 1)]]);
                if i + j + 1 < n {
                    triangles.push([
                        lattice[li(i + 1, j)],
                        lattice[li(i + 1, j + 1)],
                        lattice[li(i, j + 1)],
                    ]);
                }
            }
        }
    }

    // Lexicographic vertex order for reproducible numbering.
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        points[i][0]
            .total_cmp(&points[j][0])
            .then(points[i][1].total_cmp(&points[j][1]))
    });
    let mut new_id = vec![0; points.len()];
    for (k, &old) in order.iter().enumerate() {
        new_id[old] = k;
    }
    let vertices: Vec<Point> = order.iter().map(|&i| points[i]).collect();
    let mut triangles: Vec<[usize; 3]> = triangles
        .into_iter()
        .map(|t| canonical_rotation([new_id[t[0]], new_id[t[1]], new_id[t[2]]]))
        .collect();
    triangles.sort();

    let mut mesh = Mesh {
        vertices,
        triangles,
        boundary: Vec::new(),
        h,
        macro_children: None,
        macro_centroids: None,
    };
    mesh.boundary = find_boundary(&mesh, domain)?;
    mesh.validate()?;
    check_quality(&mesh)?;
    Ok(mesh)
}

fn canonical_rotation(t: [usize; 3]) -> [usize; 3] {
    let k = (0..3).min_by_key(|&i| t[i]).unwrap_or(0);
    [t[k], t[(k + 1) % 3], t[(k + 2) % 3]]
}

fn find_boundary(mesh: &Mesh, domain: &DomainSpec) -> Result<Vec<BoundaryEdge>> {
    let mut count: BTreeMap<[usize; 2], usize> = BTreeMap::new();
    for tri in &mesh.triangles {
        for i in 0..3 {
            let (a, b) = (tri[i], tri[(i + 1) % 3]);
            *count.entry([a.min(b), a.max(b)]).or_insert(0) += 1;
        }
    }
    let mut out = Vec::new();
    // orientation taken from the owning triangle gives counterclockwise boundary order
    for tri in &mesh.triangles {
        for i in 0..3 {
            let (a, b) = (tri[i], tri[(i + 1) % 3]);
            if count[&[a.min(b), a.max(b)]] == 1 {
                let mid = lerp(mesh.vertices[a], mesh.vertices[b], 0.5);
                let side = domain.edge_containing(mid, 1e-12).ok_or_else(|| {
                    Error::Mesh(format!("boundary edge ({a},{b}) not on the polygon"))
                })?;
                out.push(BoundaryEdge { v: [a, b], side });
            }
        }
    }
    out.sort_by_key(|e| (e.v[0].min(e.v[1]), e.v[0].max(e.v[1])));
    Ok(out)
}

fn check_quality(mesh: &Mesh) -> Result<()> {
    let report = mesh_report(mesh);
    if report.min_angle_deg < MIN_ANGLE_DEG {
        return Err(Error::Quality {
            element: report.worst_angle_element,
            detail: format!(
                "minimum angle {:.3} deg below {MIN_ANGLE_DEG}",
                report.min_angle_deg
            ),
        });
    }
    if report.h_max / report.h_min > MAX_DIAMETER_RATIO {
        return Err(Error::Quality {
            element: report.smallest_element,
            detail: format!(
                "diameter ratio {:.3} above {MAX_DIAMETER_RATIO}",
                report.h_max / report.h_min
            ),
        });
    }
    Ok(())
}

/// Splits every triangle into three through its centroid. Applies once.
pub fn barycentric_split(mesh: &Mesh) -> Result<Mesh> {
    if mesh.is_split() {
        return Err(Error::InvalidInput("mesh is already barycentrically split".into()));
    }
    mesh.validate()?;
    let mut vertices = mesh.vertices.clone();
    let mut triangles = Vec::with_capacity(3 * mesh.triangles.len());
    let mut children = Vec::with_capacity(mesh.triangles.len());
    let mut centroids = Vec::with_capacity(mesh.triangles.len());
    for (t, &[a, b, c]) in mesh.triangles.iter().enumerate() {
        let [pa, pb, pc] = mesh.coords(t);
        vertices.push([
            (pa[0] + pb[0] + pc[0]) / 3.0,
            (pa[1] + pb[1] + pc[1]) / 3.0,
        ]);
        let g = vertices.len() - 1;
        let base = triangles.len();
        triangles.push([a, b, g]);
        triangles.push([b, c, g]);
        triangles.push([c, a, g]);
        children.push([base, base + 1, base + 2]);
        centroids.push(g);
    }
    let out = Mesh {
        vertices,
        triangles,
        boundary: mesh.boundary.clone(),
        h: mesh.h,
        macro_children: Some(children),
        macro_centroids: Some(centroids),
    };
    out.validate()?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshReport {
    pub vertices: usize,
    pub triangles: usize,
    pub boundary_edges: usize,
    pub h_min: f64,
    pub h_max: f64,
    pub min_angle_deg: f64,
    pub worst_angle_element: usize,
    pub smallest_element: usize,
    pub area: f64,
    pub split: bool,
}

impl MeshReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "vertices {}", self.vertices);
        let _ = writeln!(s, "triangles {}", self.triangles);
        let _ = writeln!(s, "boundary_edges {}", self.boundary_edges);
        let _ = writeln!(s, "h_min {:.16e}", self.h_min);
        let _ = writeln!(s, "h_max {:.16e}", self.h_max);
        let _ = writeln!(s, "min_angle_deg {:.16e}", self.min_angle_deg);
        let _ = writeln!(s, "area {:.16e}", self.area);
        let _ = writeln!(s, "split {}", self.split);
        s
    }
}

pub fn mesh_report(mesh: &Mesh) -> MeshReport {
    let mut h_min = f64::INFINITY;
    let mut h_max: f64 = 0.0;
    let mut min_angle = f64::INFINITY;
    let (mut worst, mut smallest) = (0, 0);
    for t in 0..mesh.triangles.len() {
        let d = mesh.diameter(t);
        if d < h_min {
            h_min = d;
            smallest = t;
        }
        h_max = h_max.max(d);
        let a = mesh.angles(t).into_iter().fold(f64::INFINITY, f64::min);
        if a < min_angle {
            min_angle = a;
            worst = t;
        }
    }
    MeshReport {
        vertices: mesh.vertices.len(),
        triangles: mesh.triangles.len(),
        boundary_edges: mesh.boundary.len(),
        h_min,
        h_max,
        min_angle_deg: min_angle.to_degrees(),
        worst_angle_element: worst,
        smallest_element: smallest,
        area: mesh.total_area(),
        split: mesh.is_split(),
    }
}

pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    let d = sub(a, b);
    d[0].hypot(d[1])
}

fn lerp(a: Point, b: Point, s: f64) -> Point {
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

pub fn polygon_area(p: &[Point]) -> f64 {
    let n = p.len();
    0.5 * (0..n).map(|i| cross(p[i], p[(i + 1) % n])).sum::<f64>()
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    let s = if len2 > 0.0 {
        (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    dist(p, lerp(a, b, s))
}

/// Distance from `p` to the closed triangle `tri`.
pub fn point_triangle_distance(p: Point, tri: &[Point; 3]) -> f64 {
    let inside = (0..3).all(|i| cross(sub(tri[(i + 1) % 3], tri[i]), sub(p, tri[i])) >= 0.0);
    if inside {
        return 0.0;
    }
    (0..3)
        .map(|i| point_segment_distance(p, tri[i], tri[(i + 1) % 3]))
        .fold(f64::INFINITY, f64::min)
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = cross(sub(b, a), sub(c, a));
    let d2 = cross(sub(b, a), sub(d, a));
    let d3 = cross(sub(d, c), sub(a, c));
    let d4 = cross(sub(d, c), sub(b, c));
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}
