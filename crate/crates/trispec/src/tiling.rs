//! The graph of edge images of `[A0,B0]`, spectacle intervals and the
//! geometric coder.
//!
//! Vertices are never stored globally. A vertex is an [`Isometry`] frame `g`
//! plus a type; its position is `g·A0` or `g·B0` and its outgoing edges are
//! `g·R_A^j·[A0,B0]` (A-type) or `g·R_B^j·[B0,A0]` (B-type).

use crate::hyperbolic_core::{
    build_group, disk_distance, fixed_points, normalize_angle, to_disk, BoundaryPoint, ClassLength, CoreError,
    Geodesic, GroupData, Isometry, IsometryClass, Triplet,
};
use crate::words::{CyclicWord, Letter, PeriodicWord, Syllable};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Angle tolerance for deciding that a boundary point sits on an interval endpoint.
pub const TIE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TilingError {
    #[error("strip midpoints failed to converge within {0} polygons")]
    StripDivergence(usize),
    #[error("strip fixed point disagrees with midpoint limit by {0:e}")]
    StripMismatch(f64),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("no period found within {0} steps")]
    NoPeriod(usize),
    #[error("coder hit a backtracking step at vertex {0}")]
    Backtrack(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VType {
    A,
    B,
}

impl VType {
    pub fn other(self) -> VType {
        match self {
            VType::A => VType::B,
            VType::B => VType::A,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub placement: Isometry,
    pub vtype: VType,
}

impl Vertex {
    pub fn base(vtype: VType) -> Vertex {
        Vertex { placement: Isometry::identity(), vtype }
    }

    pub fn position_h(&self, gd: &GroupData) -> Complex64 {
        match self.vtype {
            VType::A => self.placement.act_h(gd.a0),
            VType::B => self.placement.act_h(gd.b0),
        }
    }

    pub fn position_disk(&self, gd: &GroupData) -> Complex64 {
        to_disk(self.position_h(gd))
    }
}

/// A directed edge; both endpoints carry the frame of the edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectedEdge {
    pub tail: Vertex,
    pub head: Vertex,
}

impl DirectedEdge {
    /// The edge `g·[A0,B0]` oriented from its `from` endpoint.
    pub fn from_frame(g: Isometry, from: VType) -> DirectedEdge {
        DirectedEdge {
            tail: Vertex { placement: g, vtype: from },
            head: Vertex { placement: g, vtype: from.other() },
        }
    }

    pub fn frame(&self) -> Isometry {
        self.tail.placement
    }

    pub fn reversed(&self) -> DirectedEdge {
        DirectedEdge { tail: self.head, head: self.tail }
    }
}

/// The chain of opposite edges through a strip of face polygons.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StripData {
    pub edges: Vec<DirectedEdge>,
    /// Hyperbolic midpoints of `edges`, in disk coordinates.
    pub midpoints: Vec<Complex64>,
    pub xi: BoundaryPoint,
    /// Endpoint reached by running the strip backwards.
    pub xi_back: BoundaryPoint,
}

/// A half-open arc of `∂D`, parametrized clockwise from `left` to `right`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectacleInterval {
    pub left: BoundaryPoint,
    pub right: BoundaryPoint,
    pub closed_left: bool,
    pub closed_right: bool,
}

impl SpectacleInterval {
    /// Angular measure of the arc.
    pub fn measure(&self) -> f64 {
        let m = normalize_angle(self.left.angle - self.right.angle);
        if m == 0.0 {
            TAU
        } else {
            m
        }
    }

    /// Clockwise offset of `x` from `left`.
    fn offset(&self, x: BoundaryPoint) -> f64 {
        normalize_angle(self.left.angle - x.angle)
    }

    pub fn contains(&self, x: BoundaryPoint) -> bool {
        let m = self.measure();
        let mut t = self.offset(x);
        if TAU - t < TIE_TOL {
            t = 0.0;
        }
        if t < TIE_TOL {
            return self.closed_left;
        }
        if (t - m).abs() < TIE_TOL {
            return self.closed_right;
        }
        t < m
    }

    /// Strict interior membership, ignoring the closure flags.
    pub fn contains_open(&self, x: BoundaryPoint) -> bool {
        let t = self.offset(x);
        t > TIE_TOL && t < self.measure() - TIE_TOL
    }
}

/// Result of path-following.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexPath {
    pub vertices: Vec<Vertex>,
    /// One syllable per vertex after the start vertex.
    pub code: Vec<Syllable>,
    /// Indices into `vertices` where the target sat on an interval endpoint.
    pub ties: Vec<usize>,
}

impl VertexPath {
    pub fn boundary_ambiguous(&self) -> bool {
        !self.ties.is_empty()
    }

    /// The code expanded into single letters.
    pub fn letters(&self) -> Vec<Letter> {
        crate::words::expand(&self.code)
    }
}

/// What a coded path aims at.
#[derive(Debug, Clone, Copy)]
pub enum Target {
    Point(BoundaryPoint),
    /// The attracting fixed point of a hyperbolic element. Path-following
    /// tracks the conjugate `g⁻¹·m·g` instead of the point itself, which keeps
    /// the local computation well conditioned along arbitrarily long paths.
    Attracting(Isometry),
}

/// Four limiting words with their detected periods.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NumericLimitingWords {
    pub u_l: PeriodicWord,
    pub u_r: PeriodicWord,
    pub v_l: PeriodicWord,
    pub v_r: PeriodicWord,
    /// Raw letter prefixes of length `n_letters`.
    pub prefixes: [Vec<Letter>; 4],
}

/// Precomputed per-triplet tiling data.
#[derive(Debug, Clone)]
pub struct Tiling {
    pub gd: GroupData,
    /// Half-turn exchanging `A0` and `B0`.
    pub half_turn: Isometry,
    /// Translation along the strip through `[A0,B0]`, two polygons per step.
    pub strip_translation: Isometry,
    /// `ξ_{A0,B0}`.
    pub xi0: BoundaryPoint,
    /// Disk positions of the face polygon left of `A0 → B0`, starting `A0, B0`.
    pub base_polygon: Vec<Complex64>,
    /// Frame of the edge opposite `[A0,B0]` in the base polygon.
    pub opposite_frame: Isometry,
    t0: f64,
    t1: f64,
    ra_pow: Vec<Isometry>,
    rb_pow: Vec<Isometry>,
}

/// Reflection of the disk in the geodesic through `u` and `v`.
pub fn reflect_disk(u: Complex64, v: Complex64, x: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let phi = |z: Complex64| (z - u) / (one - u.conj() * z);
    let phi_inv = |z: Complex64| (z + u) / (one + u.conj() * z);
    let th = phi(v).arg();
    phi_inv(Complex64::from_polar(1.0, 2.0 * th) * phi(x).conj())
}

/// Hyperbolic midpoint of two disk points.
pub fn disk_midpoint(u: Complex64, v: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let w = (v - u) / (one - u.conj() * v);
    let n = w.norm();
    if n == 0.0 {
        return u;
    }
    let m = w / n * (n.atanh() * 0.5).tanh();
    (m + u) / (one + u.conj() * m)
}

/// Matrix of `J·M·J` where `J(z) = −z̄` is the reflection in the imaginary axis of `H`.
fn conj_by_j(m: &Isometry) -> Isometry {
    Isometry::new(m.m[0], -m.m[1], -m.m[2], m.m[3])
}

/// An isometry taking the imaginary axis of `H` onto the geodesic through `u, v ∈ H`.
fn axis_frame(u: Complex64, v: Complex64) -> Isometry {
    let t = Isometry::translation_to(u).inverse();
    let w = to_disk(t.act_h(v));
    let rho = Isometry::rotation_about_i(-w.arg());
    rho.mul(&t).inverse()
}

impl Tiling {
    pub fn new(t: Triplet) -> Result<Self, TilingError> {
        let gd = build_group(t);
        let half_turn = Isometry::new(0.0, -(gd.side_ab * 0.5).exp(), (-gd.side_ab * 0.5).exp(), 0.0);
        let r = t.r as usize;
        let rc = gd.gen_a.mul(&gd.gen_b).inverse();
        let mut base_polygon = Vec::with_capacity(2 * r);
        let mut rk = Isometry::identity();
        for _ in 0..r {
            base_polygon.push(to_disk(rk.act_h(gd.a0)));
            base_polygon.push(to_disk(rk.act_h(gd.b0)));
            rk = rk.mul(&rc);
        }
        // Edge E_k joins V_k and V_{k+1}; E_{2k} has frame R_C^k and E_{2k+1} has frame R_C^k R_B^{-1}.
        let opposite_frame = if r % 2 == 0 {
            rc.pow((r / 2) as i64)
        } else {
            rc.pow(((r - 1) / 2) as i64).mul(&gd.gen_b.inverse())
        };
        // Strip translation: reflect in E_0, then in E_r.
        let h0 = axis_frame(gd.a0, gd.b0);
        let hr = axis_frame(opposite_frame.act_h(gd.a0), opposite_frame.act_h(gd.b0));
        let strip_translation = hr.mul(&conj_by_j(&hr.inverse().mul(&h0))).mul(&h0.inverse());
        let (xi_fp, _) = fixed_points(&strip_translation)?;
        let ra_pow = (0..t.p).map(|j| gd.gen_a.pow(j as i64)).collect();
        let rb_pow = (0..t.q).map(|j| gd.gen_b.pow(j as i64)).collect();
        let t0 = xi_fp.angle;
        let t1 = half_turn.act_boundary(xi_fp).angle;
        let mut tiling = Tiling {
            gd,
            half_turn,
            strip_translation,
            xi0: xi_fp,
            base_polygon,
            opposite_frame,
            t0,
            t1,
            ra_pow,
            rb_pow,
        };
        let strip = tiling.strip_by_midpoints(&DirectedEdge::from_frame(Isometry::identity(), VType::A))?;
        let err = strip.xi.circle_distance(xi_fp);
        if err > 1e-10 {
            return Err(TilingError::StripMismatch(err));
        }
        tiling.xi0 = xi_fp;
        Ok(tiling)
    }

    pub fn triplet(&self) -> Triplet {
        self.gd.triplet
    }

    fn ra(&self, j: i64) -> Isometry {
        self.ra_pow[j.rem_euclid(self.gd.triplet.p as i64) as usize]
    }

    fn rb(&self, j: i64) -> Isometry {
        self.rb_pow[j.rem_euclid(self.gd.triplet.q as i64) as usize]
    }

    /// Outgoing edges, anticlockwise, starting with the frame edge of `v`.
    pub fn neighbors(&self, v: &Vertex) -> Vec<DirectedEdge> {
        let g = v.placement;
        match v.vtype {
            VType::A => (0..self.gd.triplet.p as i64)
                .map(|j| DirectedEdge::from_frame(g.mul(&self.ra(j)), VType::A))
                .collect(),
            VType::B => (0..self.gd.triplet.q as i64)
                .map(|j| DirectedEdge::from_frame(g.mul(&self.rb(j)), VType::B))
                .collect(),
        }
    }

    /// Builds the opposite-polygon strip forward from `e` by repeated
    /// reflection and returns the limit of the opposite-edge midpoints.
    pub fn xi_endpoint(&self, e: &DirectedEdge) -> Result<StripData, TilingError> {
        self.strip_by_midpoints(e)
    }

    fn strip_by_midpoints(&self, e: &DirectedEdge) -> Result<StripData, TilingError> {
        const CAP: usize = 200;
        let g = e.frame();
        let r = self.gd.triplet.r as usize;
        let mut poly: Vec<Complex64> = self.base_polygon.iter().map(|&z| g.act_disk(z)).collect();
        let mut entry = 0usize;
        let mut midpoints = vec![disk_midpoint(poly[0], poly[1])];
        let mut converged = false;
        for _ in 0..CAP {
            let opp = (entry + r) % (2 * r);
            let (u, v) = (poly[opp], poly[(opp + 1) % (2 * r)]);
            let mid = disk_midpoint(u, v);
            let prev = *midpoints.last().unwrap_or(&mid);
            midpoints.push(mid);
            // Midpoints approach ξ non-tangentially, so closeness to ∂D bounds the angular error too.
            if (mid - prev).norm() < 1e-12 || 1.0 - mid.norm() < 1e-13 {
                converged = true;
                break;
            }
            for z in poly.iter_mut() {
                *z = reflect_disk(u, v, *z);
            }
            // Reflection fixes u and v, so the labels of the shared edge are unchanged.
            entry = opp;
        }
        if !converged {
            return Err(TilingError::StripDivergence(CAP));
        }
        let xi = BoundaryPoint::from_complex(*midpoints.last().unwrap());
        let tr = g.conjugate(&self.strip_translation);
        let (_, back) = fixed_points(&tr)?;
        // Graph edges of the chain: T^k·E_0 and T^k·E_r, conjugated into the frame of e.
        let mut edges = Vec::with_capacity(midpoints.len());
        let mut tk = Isometry::identity();
        while edges.len() < midpoints.len() {
            edges.push(DirectedEdge::from_frame(g.mul(&tk), VType::A));
            if edges.len() < midpoints.len() {
                edges.push(DirectedEdge::from_frame(g.mul(&tk).mul(&self.opposite_frame), VType::A));
            }
            tk = tk.mul(&self.strip_translation);
        }
        Ok(StripData { edges, midpoints, xi, xi_back: back })
    }

    /// `ξ` of an edge by equivariance from the base strip.
    pub fn xi_of_frame(&self, g: &Isometry) -> BoundaryPoint {
        g.act_boundary(self.xi0)
    }

    /// Axis of the strip through the edge with frame `g`, oriented towards `ξ`.
    pub fn strip_axis(&self, g: &Isometry) -> Geodesic {
        Geodesic::axis(&self.strip_translation)
            .expect("strip translation is hyperbolic")
            .apply(g)
    }

    pub fn spectacle_interval(&self, e: &DirectedEdge, dual: bool) -> SpectacleInterval {
        let g = e.frame();
        let (left, right) = match e.tail.vtype {
            VType::A => (self.xi_of_frame(&g), self.xi_of_frame(&g.mul(&self.ra(-1)))),
            VType::B => (self.xi_of_frame(&g.mul(&self.rb(1))), self.xi_of_frame(&g)),
        };
        SpectacleInterval { left, right, closed_left: !dual, closed_right: dual }
    }

    /// Index `j` of the outgoing edge `g·R^j` whose interval contains the
    /// local point `x = g⁻¹ξ`, and whether `x` sat on an endpoint.
    fn local_choice(&self, vtype: VType, x_local: Complex64, dual: bool) -> (i64, bool) {
        let (n, t, pt) = match vtype {
            VType::A => (self.gd.triplet.p as f64, self.t0, x_local),
            VType::B => (self.gd.triplet.q as f64, self.t1, self.half_turn.act_disk(x_local)),
        };
        let phi = pt.im.atan2(pt.re);
        let mut s = normalize_angle(phi - t) * n / TAU;
        if n - s < TIE_TOL * n / TAU {
            s -= n;
        }
        let k = s.round();
        let tie = (s - k).abs() * TAU / n < TIE_TOL;
        let j = match (vtype, tie, dual) {
            (VType::A, true, false) => k,
            (VType::A, true, true) => k + 1.0,
            (VType::A, false, false) => s.ceil(),
            (VType::A, false, true) => s.floor() + 1.0,
            (VType::B, true, false) => k - 1.0,
            (VType::B, true, true) => k,
            (VType::B, false, false) => s.ceil() - 1.0,
            (VType::B, false, true) => s.floor(),
        };
        (j as i64, tie)
    }

    fn syllable_for(&self, vtype: VType, j: i64) -> Syllable {
        match vtype {
            VType::A => Syllable::new(Letter::A, j.rem_euclid(self.gd.triplet.p as i64) as u32),
            VType::B => Syllable::new(Letter::B, (-j).rem_euclid(self.gd.triplet.q as i64) as u32),
        }
    }

    fn step_frame(&self, v: &Vertex, j: i64) -> Isometry {
        match v.vtype {
            VType::A => v.placement.mul(&self.ra(j)),
            VType::B => v.placement.mul(&self.rb(j)),
        }
    }

    /// Follows the spectacles from `start` towards `target` for `max_steps` edges.
    pub fn follow(&self, start: Vertex, target: Target, dual: bool, max_steps: usize) -> VertexPath {
        let mut vertices = vec![start];
        let mut code = Vec::with_capacity(max_steps);
        let mut ties = Vec::new();
        let mut v = start;
        let mut conj = match target {
            Target::Attracting(m) => Some(v.placement.inverse().mul(&m).mul(&v.placement)),
            Target::Point(_) => None,
        };
        for step in 0..max_steps {
            let x_local = match (target, conj) {
                (Target::Point(xi), _) => v.placement.inverse().act_disk(xi.to_disk()),
                (Target::Attracting(_), Some(c)) => {
                    fixed_points(&c).map(|(att, _)| att.to_disk()).unwrap_or(Complex64::new(1.0, 0.0))
                }
                _ => unreachable!(),
            };
            let (j, tie) = self.local_choice(v.vtype, x_local, dual);
            if tie {
                ties.push(step);
            }
            if step > 0 {
                code.push(self.syllable_for(v.vtype, j));
            }
            let x = match v.vtype {
                VType::A => self.ra(j),
                VType::B => self.rb(j),
            };
            let g = self.step_frame(&v, j);
            if let Some(c) = conj {
                conj = Some(x.inverse().mul(&c).mul(&x));
            }
            v = Vertex { placement: g, vtype: v.vtype.other() };
            vertices.push(v);
        }
        VertexPath { vertices, code, ties }
    }

    /// Path-following towards a boundary point.
    pub fn follow_path(&self, start: Vertex, xi: BoundaryPoint, dual: bool, max_steps: usize) -> VertexPath {
        self.follow(start, Target::Point(xi), dual, max_steps)
    }

    /// The vertex nearest to `p` reached by greedy descent from `A0`.
    pub fn nearest_vertex(&self, p: Complex64) -> Vertex {
        let mut v = Vertex::base(VType::A);
        let mut best = disk_distance(v.position_disk(&self.gd), p);
        loop {
            let mut improved = None;
            for e in self.neighbors(&v) {
                let d = disk_distance(e.head.position_disk(&self.gd), p);
                if d < best - 1e-12 {
                    best = d;
                    improved = Some(e.head);
                }
            }
            match improved {
                Some(w) => v = w,
                None => return v,
            }
        }
    }

    /// Follows the spectacles towards the attracting point of `m` until the
    /// path repeats under an element commuting with `m`.
    ///
    /// Returns the letters before the periodic part and one period. The
    /// conjugates `g_k⁻¹·m·g_k` stay bounded along a path converging to the
    /// attracting point, and two of them agree at same-type vertices exactly
    /// when the path repeats.
    pub fn follow_until_periodic(
        &self,
        start: Vertex,
        m: &Isometry,
        dual: bool,
        max_steps: usize,
    ) -> Result<(Vec<Syllable>, Vec<Syllable>), TilingError> {
        let mut v = start;
        let mut c = v.placement.inverse().mul(m).mul(&v.placement);
        let mut history: Vec<(VType, Isometry)> = Vec::new();
        let mut code: Vec<Syllable> = Vec::new();
        for step in 0..max_steps {
            // Distinct conjugates at one vertex differ by O(1), while rounding in
            // the starting matrix is amplified along the path; a loose tolerance
            // separates the two.
            let tol = 1e-4 * c.norm_max().max(1.0);
            if let Some(i) = history
                .iter()
                .enumerate()
                .skip(1)
                .find(|(_, (t, ci))| *t == v.vtype && ci.approx_eq(&c, tol))
                .map(|(i, _)| i)
            {
                let period = code[i - 1..].to_vec();
                code.truncate(i - 1);
                return Ok((code, period));
            }
            history.push((v.vtype, c));
            let local = fixed_points(&c)?.0.to_disk();
            let (j, _) = self.local_choice(v.vtype, local, dual);
            if step > 0 {
                let syl = self.syllable_for(v.vtype, j);
                if syl.exp == 0 {
                    return Err(TilingError::Backtrack(step));
                }
                code.push(syl);
            }
            let x = match v.vtype {
                VType::A => self.ra(j),
                VType::B => self.rb(j),
            };
            c = x.inverse().mul(&c).mul(&x);
            v = Vertex { placement: v.placement.mul(&x), vtype: v.vtype.other() };
        }
        Err(TilingError::NoPeriod(max_steps))
    }

    /// Cyclic code of the conjugacy class of a hyperbolic element.
    ///
    /// Rounding in a long product `m` can push a target that sits exactly on
    /// an interval endpoint to the wrong side. The detected period is itself
    /// a short word for a conjugate of `m`, so it is re-coded until the code
    /// reproduces itself.
    pub fn code_of_element(&self, m: &Isometry) -> Result<CyclicWord, TilingError> {
        let cl: ClassLength = crate::hyperbolic_core::classify_and_length(m);
        if cl.class != IsometryClass::Hyperbolic {
            return Err(CoreError::NoAxis(format!("{:.12}", m.trace().abs())).into());
        }
        let bound = 10 * (64 + 4 * (cl.length.ceil() as usize + 1) * self.gd.triplet.r as usize);
        let mut current = *m;
        let mut last: Option<CyclicWord> = None;
        for _ in 0..4 {
            let axis = Geodesic::axis(&current)?;
            let start = self.nearest_vertex(axis.point_at(0.0));
            let (_, period) = self.follow_until_periodic(start, &current, false, bound)?;
            let word = self.repeat_to_length(&period, cl.length);
            if last.as_ref() == Some(&word) {
                return Ok(word);
            }
            current = crate::words::matrix_of_word(&word, &self.gd);
            last = Some(word);
        }
        Ok(last.expect("at least one pass"))
    }

    fn repeat_to_length(&self, period: &[Syllable], length: f64) -> CyclicWord {
        let prim = CyclicWord::from_syllables(period.to_vec()).expect("coded period alternates");
        let pl = crate::words::matrix_of_syllables(&prim.syllables, &self.gd);
        let pl = crate::hyperbolic_core::length_from_trace(pl.trace().abs());
        let k = (length / pl).round().max(1.0) as usize;
        prim.power(k)
    }

    /// The four limiting words, each as an eventually periodic word.
    pub fn limiting_words_numeric(&self, n_letters: usize) -> Result<NumericLimitingWords, TilingError> {
        let t = self.strip_translation;
        let gb = self.gd.gen_b;
        let ga = self.gd.gen_a;
        let run = |start: VType, target: Isometry, dual: bool| -> Result<PeriodicWord, TilingError> {
            let (pre, per) = self.follow_until_periodic(Vertex::base(start), &target, dual, 400)?;
            Ok(PeriodicWord { prefix: crate::words::expand(&pre), period: crate::words::expand(&per) })
        };
        let u_l = run(VType::B, gb.conjugate(&t), false)?;
        let u_r = run(VType::B, t, true)?;
        let v_l = run(VType::A, t, false)?;
        let v_r = run(VType::A, ga.inverse().conjugate(&t), true)?;
        let prefixes = [&u_l, &u_r, &v_l, &v_r].map(|w| w.first_letters(n_letters));
        Ok(NumericLimitingWords { u_l, u_r, v_l, v_r, prefixes })
    }
}
