//! Decorated knot diagrams on closed oriented surfaces.
//!
//! A diagram is stored as a signed Gauss code: the traversal lists the
//! crossings in passage order and each crossing carries a sign fixing the
//! local rotation system. Faces are the orbits of the combinatorial map;
//! regions are faces, except that two orbits may be merged into a single
//! annular region (needed for curves whose complement has a non-disk
//! component, e.g. parallel essential circles on a torus).
//!
//! Ray conventions at a crossing, counterclockwise for sign `+`:
//! `out1, out2, in1, in2`; for sign `-`: `out1, in2, in1, out2`. Here
//! passage 1 is the first passage in the traversal as written. Quadrant `k`
//! is the corner swept counterclockwise from ray `u_k`, with `u_0 = out1`
//! and `u_{k+1} = sigma(u_k)`; quadrants `{0,2}` and `{1,3}` are the two
//! opposite pairs. The `plus` decoration marks one pair, the `anchor`
//! quadrant fixes which pair carries the `a+` labels.

use crate::algebra::{GenKind, Letter};
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("open traversal: crossing {0} is visited {1} time(s), expected 2")]
    OpenTraversal(u32, usize),
    #[error("traversal is empty")]
    EmptyTraversal,
    #[error("missing `{field}` for crossing {crossing}")]
    MissingDecoration { field: &'static str, crossing: u32 },
    #[error("defects: expected {expected} values (one per region), got {got}")]
    DefectCount { expected: usize, got: usize },
    #[error("annulus: orbit index {0} out of range or used twice")]
    BadAnnulus(usize),
    #[error("basepoint {0} out of range 1..={1}")]
    BadBasepoint(u32, usize),
}

/// Transversal direction at a `c` point, relative to the traversal
/// orientation of its edge.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub id: u32,
    pub sign: i8,
    /// Which opposite quadrant pair carries the `+` decoration: 0 or 1.
    pub plus_pair: u8,
    /// A quadrant index 0..4; the pair containing it carries the `a+` labels.
    pub anchor: u8,
}

/// Ray roles at a crossing.
pub const OUT1: usize = 0;
pub const OUT2: usize = 1;
pub const IN1: usize = 2;
pub const IN2: usize = 3;

#[derive(Clone, Debug)]
pub struct EdgeInfo {
    pub tail_ray: usize,
    pub head_ray: usize,
    /// 1-based edge number counted from the basepoint edge along the
    /// traversal.
    pub seq: u32,
    /// The special point carried by this edge: `c_i` on odd-numbered edges,
    /// `d_i` on even-numbered ones.
    pub special: Letter,
}

#[derive(Clone, Debug)]
pub struct Region {
    /// Canonical orbit indices making up this region. One orbit for a disk
    /// region, two for an annular region.
    pub orbits: Vec<usize>,
    pub defect: i64,
}

impl Region {
    /// Euler characteristic of the open region: 2 minus the number of
    /// boundary walks (regions carry no handles of their own here).
    pub fn chi(&self) -> i64 {
        2 - self.orbits.len() as i64
    }

    pub fn is_disk(&self) -> bool {
        self.orbits.len() == 1
    }
}

/// A directed edge: `2 * edge + dir`, `dir` 0 forward (with the traversal).
pub type DirEdge = usize;

#[derive(Clone, Debug)]
pub struct Diagram {
    pub genus: u32,
    pub euler: i64,
    pub traversal: Vec<u32>,
    pub crossings: Vec<Crossing>,
    pub basepoint: u32,
    /// Transversal side per `c` index (1-based); missing means `Left`.
    pub transversals: BTreeMap<u32, Side>,
    /// Pairs of canonical orbit indices merged into annular regions.
    pub annuli: Vec<(usize, usize)>,

    // Derived structure.
    crossing_of_id: BTreeMap<u32, usize>,
    /// Passage positions (into `traversal`) of each crossing: [first, second].
    pub passages: Vec<[usize; 2]>,
    pub edges: Vec<EdgeInfo>,
    sigma: Vec<usize>,
    sigma_inv: Vec<usize>,
    ray_tail_de: Vec<DirEdge>,
    ray_head_de: Vec<DirEdge>,
    /// Canonically ordered orbits, each a cyclic list of directed edges.
    pub orbits: Vec<Vec<DirEdge>>,
    de_orbit: Vec<usize>,
    pub regions: Vec<Region>,
    orbit_region: Vec<usize>,
    /// Region index of each quadrant, per crossing.
    quadrant_region: Vec<[usize; 4]>,
    /// Ray `u_k` of quadrant `k`, per crossing.
    quadrant_first_ray: Vec<[usize; 4]>,
}

impl Diagram {
    pub fn num_crossings(&self) -> usize {
        self.crossings.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn crossing_index(&self, id: u32) -> Option<usize> {
        self.crossing_of_id.get(&id).copied()
    }

    pub fn sigma(&self, ray: usize) -> usize {
        self.sigma[ray]
    }

    pub fn sigma_inv(&self, ray: usize) -> usize {
        self.sigma_inv[ray]
    }

    pub fn ray_crossing(&self, ray: usize) -> usize {
        ray / 4
    }

    /// The directed edge leaving along `ray`.
    pub fn de_from_ray(&self, ray: usize) -> DirEdge {
        self.ray_tail_de[ray]
    }

    /// The directed edge arriving with head `ray`.
    pub fn de_into_ray(&self, ray: usize) -> DirEdge {
        self.ray_head_de[ray]
    }

    pub fn de_edge(&self, de: DirEdge) -> usize {
        de / 2
    }

    pub fn de_forward(&self, de: DirEdge) -> bool {
        de % 2 == 0
    }

    pub fn de_reverse(&self, de: DirEdge) -> DirEdge {
        de ^ 1
    }

    pub fn de_tail_ray(&self, de: DirEdge) -> usize {
        let e = &self.edges[de / 2];
        if de % 2 == 0 {
            e.tail_ray
        } else {
            e.head_ray
        }
    }

    pub fn de_head_ray(&self, de: DirEdge) -> usize {
        let e = &self.edges[de / 2];
        if de % 2 == 0 {
            e.head_ray
        } else {
            e.tail_ray
        }
    }

    /// Next directed edge of the face walk (face kept on the left).
    pub fn face_next(&self, de: DirEdge) -> DirEdge {
        self.ray_tail_de[self.sigma_inv[self.de_head_ray(de)]]
    }

    /// Continue straight through the crossing at the head of `de`.
    pub fn straight_next(&self, de: DirEdge) -> DirEdge {
        let h = self.de_head_ray(de);
        self.ray_tail_de[self.sigma[self.sigma[h]]]
    }

    /// Turn a convex corner (disk on the left) at the head of `de`: covers
    /// quadrant `(sigma^{-1}(h), h)` and leaves along `sigma^{-1}(h)`.
    pub fn corner_next(&self, de: DirEdge) -> DirEdge {
        self.ray_tail_de[self.sigma_inv[self.de_head_ray(de)]]
    }

    /// Quadrant index of the corner `(u, sigma(u))` at the crossing of `u`.
    pub fn quadrant_of_first_ray(&self, u: usize) -> (usize, usize) {
        let x = u / 4;
        let k = self.quadrant_first_ray[x]
            .iter()
            .position(|&r| r == u)
            .expect("every ray is the first ray of exactly one quadrant");
        (x, k)
    }

    pub fn quadrant_rays(&self, x: usize, q: usize) -> (usize, usize) {
        let u = self.quadrant_first_ray[x][q];
        (u, self.sigma[u])
    }

    pub fn quadrant_region(&self, x: usize, q: usize) -> usize {
        self.quadrant_region[x][q]
    }

    pub fn orbit_of_de(&self, de: DirEdge) -> usize {
        self.de_orbit[de]
    }

    pub fn region_of_orbit(&self, orbit: usize) -> usize {
        self.orbit_region[orbit]
    }

    pub fn region_of_de(&self, de: DirEdge) -> usize {
        self.orbit_region[self.de_orbit[de]]
    }

    /// Whether quadrant `q` of crossing `x` carries the `+` decoration.
    pub fn is_plus(&self, x: usize, q: usize) -> bool {
        (q % 2) as u8 == self.crossings[x].plus_pair
    }

    /// The letter whose `+` label sits on quadrant `q` of crossing `x`.
    pub fn pos_letter(&self, x: usize, q: usize) -> Letter {
        let kind = if (q % 2) as u8 == self.crossings[x].anchor % 2 {
            GenKind::A
        } else {
            GenKind::B
        };
        Letter::new(kind, self.crossings[x].id)
    }

    /// The letter whose `-` label sits on quadrant `q` of crossing `x`.
    pub fn neg_letter(&self, x: usize, q: usize) -> Letter {
        let kind = if (q % 2) as u8 == self.crossings[x].anchor % 2 {
            GenKind::B
        } else {
            GenKind::A
        };
        Letter::new(kind, self.crossings[x].id)
    }

    /// Transversal side at the `c` point with the given index.
    pub fn transversal(&self, c_index: u32) -> Side {
        self.transversals
            .get(&c_index)
            .copied()
            .unwrap_or(Side::Left)
    }

    /// Whether the transversal at the special point of `de`'s edge points
    /// into the region on the left of the walk along `de`. Only meaningful
    /// for `c` points.
    pub fn transversal_points_into_walk_left(&self, de: DirEdge) -> bool {
        let sp = self.edges[de / 2].special;
        debug_assert_eq!(sp.kind, GenKind::C);
        let left_of_traversal = self.transversal(sp.site) == Side::Left;
        left_of_traversal == self.de_forward(de)
    }

    /// Generating series of this diagram, in canonical order: `a_i`, `b_i`
    /// per crossing id, then `c_j`, `d_j` per edge-point index.
    pub fn generator_letters(&self) -> Vec<Letter> {
        let mut out = Vec::new();
        for c in &self.crossings {
            out.push(Letter::new(GenKind::A, c.id));
            out.push(Letter::new(GenKind::B, c.id));
        }
        let m = self.num_crossings() as u32;
        for i in 1..=m {
            out.push(Letter::new(GenKind::C, i));
            out.push(Letter::new(GenKind::D, i));
        }
        out
    }

    /// The edge position (0-based) carrying the given special point.
    pub fn edge_of_special(&self, sp: Letter) -> Option<usize> {
        self.edges.iter().position(|e| e.special == sp)
    }

    /// Signed incidence of each region boundary with each edge:
    /// `boundary[r][e] = (#forward darts of e in r) - (#backward darts)`.
    pub fn region_boundary_matrix(&self) -> Vec<Vec<i64>> {
        let mut rows = vec![vec![0i64; self.num_edges()]; self.regions.len()];
        for (oi, orbit) in self.orbits.iter().enumerate() {
            let r = self.orbit_region[oi];
            for &de in orbit {
                let e = de / 2;
                if de % 2 == 0 {
                    rows[r][e] += 1;
                } else {
                    rows[r][e] -= 1;
                }
            }
        }
        rows
    }

    /// Corner count of each region: the number of quadrants whose face lies
    /// in the region.
    pub fn region_corner_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.regions.len()];
        for x in 0..self.num_crossings() {
            for q in 0..4 {
                counts[self.quadrant_region[x][q]] += 1;
            }
        }
        counts
    }

    // ------------------------------------------------------------------
    // Construction
    // ------------------------------------------------------------------

    pub fn build(
        genus: u32,
        euler: i64,
        traversal: Vec<u32>,
        crossings: Vec<Crossing>,
        basepoint: u32,
        transversals: BTreeMap<u32, Side>,
        annuli: Vec<(usize, usize)>,
        defects: Vec<i64>,
    ) -> Result<Diagram, DiagramError> {
        if traversal.is_empty() {
            return Err(DiagramError::EmptyTraversal);
        }
        // Passage structure: every crossing appears exactly twice.
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        for &id in &traversal {
            *counts.entry(id).or_default() += 1;
        }
        for (&id, &n) in &counts {
            if n != 2 {
                return Err(DiagramError::OpenTraversal(id, n));
            }
        }
        let mut crossing_of_id = BTreeMap::new();
        for (idx, c) in crossings.iter().enumerate() {
            crossing_of_id.insert(c.id, idx);
        }
        for &id in counts.keys() {
            if !crossing_of_id.contains_key(&id) {
                return Err(DiagramError::MissingDecoration {
                    field: "sign",
                    crossing: id,
                });
            }
        }

        let m = crossings.len();
        let n_edges = traversal.len();
        if !(1..=n_edges as u32).contains(&basepoint) {
            return Err(DiagramError::BadBasepoint(basepoint, n_edges));
        }

        let mut passages = vec![[usize::MAX; 2]; m];
        for (pos, &id) in traversal.iter().enumerate() {
            let x = crossing_of_id[&id];
            if passages[x][0] == usize::MAX {
                passages[x][0] = pos;
            } else {
                passages[x][1] = pos;
            }
        }

        // Rays: 4 per crossing, roles OUT1, OUT2, IN1, IN2.
        let ray = |x: usize, role: usize| 4 * x + role;
        let mut sigma = vec![0usize; 4 * m];
        for (x, c) in crossings.iter().enumerate() {
            let cycle: [usize; 4] = if c.sign >= 0 {
                [OUT1, OUT2, IN1, IN2]
            } else {
                [OUT1, IN2, IN1, OUT2]
            };
            for k in 0..4 {
                sigma[ray(x, cycle[k])] = ray(x, cycle[(k + 1) % 4]);
            }
        }
        let mut sigma_inv = vec![0usize; 4 * m];
        for r in 0..4 * m {
            sigma_inv[sigma[r]] = r;
        }

        // Edges: edge p runs from passage p's out ray to passage p+1's in ray.
        let out_ray_of_pos = |pos: usize| {
            let x = crossing_of_id[&traversal[pos]];
            let role = if passages[x][0] == pos { OUT1 } else { OUT2 };
            ray(x, role)
        };
        let in_ray_of_pos = |pos: usize| {
            let x = crossing_of_id[&traversal[pos]];
            let role = if passages[x][0] == pos { IN1 } else { IN2 };
            ray(x, role)
        };
        let mut edges = Vec::with_capacity(n_edges);
        for p in 0..n_edges {
            let seq0 = (p + n_edges - (basepoint as usize - 1)) % n_edges;
            let seq = seq0 as u32 + 1;
            let special = if seq % 2 == 1 {
                Letter::new(GenKind::C, seq.div_ceil(2))
            } else {
                Letter::new(GenKind::D, seq / 2)
            };
            edges.push(EdgeInfo {
                tail_ray: out_ray_of_pos(p),
                head_ray: in_ray_of_pos((p + 1) % n_edges),
                seq,
                special,
            });
        }

        let mut ray_tail_de = vec![usize::MAX; 4 * m];
        let mut ray_head_de = vec![usize::MAX; 4 * m];
        for (e, info) in edges.iter().enumerate() {
            ray_tail_de[info.tail_ray] = 2 * e;
            ray_head_de[info.head_ray] = 2 * e;
            ray_tail_de[info.head_ray] = 2 * e + 1;
            ray_head_de[info.tail_ray] = 2 * e + 1;
        }

        // Face orbits of de -> ray_tail_de[sigma_inv[head]].
        let n_de = 2 * n_edges;
        let mut de_orbit = vec![usize::MAX; n_de];
        let mut raw_orbits: Vec<Vec<DirEdge>> = Vec::new();
        for start in 0..n_de {
            if de_orbit[start] != usize::MAX {
                continue;
            }
            let mut orbit = Vec::new();
            let mut de = start;
            loop {
                de_orbit[de] = raw_orbits.len();
                orbit.push(de);
                de = ray_tail_de[sigma_inv[{
                    let e = &edges[de / 2];
                    if de % 2 == 0 {
                        e.head_ray
                    } else {
                        e.tail_ray
                    }
                }]];
                if de == start {
                    break;
                }
            }
            raw_orbits.push(orbit);
        }

        // Canonical orbit order: lexicographic minimum over (edge seq, side).
        let orbit_key = |orbit: &Vec<DirEdge>| {
            orbit
                .iter()
                .map(|&de| (edges[de / 2].seq, (de % 2) as u32))
                .min()
                .unwrap()
        };
        let mut order: Vec<usize> = (0..raw_orbits.len()).collect();
        order.sort_by_key(|&i| orbit_key(&raw_orbits[i]));
        let mut orbits = Vec::with_capacity(raw_orbits.len());
        let mut relabel = vec![0usize; raw_orbits.len()];
        for (new_i, &old_i) in order.iter().enumerate() {
            relabel[old_i] = new_i;
            orbits.push(raw_orbits[old_i].clone());
        }
        for o in de_orbit.iter_mut() {
            *o = relabel[*o];
        }

        // Regions: merge annulus pairs, keep canonical order by minimal key.
        let mut used = vec![false; orbits.len()];
        for &(i, j) in &annuli {
            if i >= orbits.len() || j >= orbits.len() || i == j || used[i] || used[j] {
                return Err(DiagramError::BadAnnulus(if i >= orbits.len() || used[i] {
                    i
                } else {
                    j
                }));
            }
            used[i] = true;
            used[j] = true;
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut grouped = vec![false; orbits.len()];
        for &(i, j) in &annuli {
            let mut g = vec![i, j];
            g.sort_unstable();
            grouped[i] = true;
            grouped[j] = true;
            groups.push(g);
        }
        for i in 0..orbits.len() {
            if !grouped[i] {
                groups.push(vec![i]);
            }
        }
        groups.sort_by_key(|g| g.iter().copied().min().unwrap());

        if defects.len() != groups.len() {
            return Err(DiagramError::DefectCount {
                expected: groups.len(),
                got: defects.len(),
            });
        }

        let mut regions = Vec::with_capacity(groups.len());
        let mut orbit_region = vec![0usize; orbits.len()];
        for (ri, g) in groups.iter().enumerate() {
            for &oi in g {
                orbit_region[oi] = ri;
            }
            regions.push(Region {
                orbits: g.clone(),
                defect: defects[ri],
            });
        }

        // Quadrants.
        let mut quadrant_first_ray = Vec::with_capacity(m);
        let mut quadrant_region = Vec::with_capacity(m);
        for x in 0..m {
            let mut first = [0usize; 4];
            first[0] = ray(x, OUT1);
            for k in 1..4 {
                first[k] = sigma[first[k - 1]];
            }
            let mut reg = [0usize; 4];
            for k in 0..4 {
                // Corner (u, sigma u) lies in the face whose walk leaves
                // along u.
                reg[k] = orbit_region[de_orbit[ray_tail_de[first[k]]]];
            }
            quadrant_first_ray.push(first);
            quadrant_region.push(reg);
        }

        Ok(Diagram {
            genus,
            euler,
            traversal,
            crossings,
            basepoint,
            transversals,
            annuli,
            crossing_of_id,
            passages,
            edges,
            sigma,
            sigma_inv,
            ray_tail_de,
            ray_head_de,
            orbits,
            de_orbit,
            regions,
            orbit_region,
            quadrant_region,
            quadrant_first_ray,
        })
    }

    // ------------------------------------------------------------------
    // Validation
    // ------------------------------------------------------------------

    /// Check every diagram invariant; an empty report means valid.
    pub fn validate(&self) -> Vec<String> {
        let mut report = Vec::new();
        let v = self.num_crossings() as i64;
        let e = self.num_edges() as i64;
        let chi_regions: i64 = self.regions.iter().map(|r| r.chi()).sum();
        if v - e + chi_regions != 2 - 2 * self.genus as i64 {
            report.push(format!(
                "Euler formula violated: V - E + sum(chi) = {} but 2 - 2g = {}",
                v - e + chi_regions,
                2 - 2 * self.genus as i64
            ));
        }
        let defect_sum: i64 = self.regions.iter().map(|r| r.defect).sum();
        if defect_sum != self.euler {
            report.push(format!(
                "defect sum != euler number: sum n_i = {defect_sum}, e(E) = {}",
                self.euler
            ));
        }
        if self.euler >= 0 {
            report.push(format!(
                "euler number must be negative, got {}",
                self.euler
            ));
        }
        for c in &self.crossings {
            if c.plus_pair > 1 {
                report.push(format!("crossing {}: plus pair must be 0 or 1", c.id));
            }
            if c.anchor > 3 {
                report.push(format!("crossing {}: anchor must be in 0..=3", c.id));
            }
            if c.sign != 1 && c.sign != -1 {
                report.push(format!("crossing {}: sign must be +1 or -1", c.id));
            }
        }
        for (i, sp) in self.transversals.keys().enumerate() {
            let _ = i;
            if *sp == 0 || *sp > self.num_crossings() as u32 {
                report.push(format!("transversal c{sp}: no such c point"));
            }
        }
        report
    }

    // ------------------------------------------------------------------
    // Text format
    // ------------------------------------------------------------------

    pub fn parse(text: &str) -> Result<Diagram, DiagramError> {
        let mut genus: Option<u32> = None;
        let mut euler: Option<i64> = None;
        let mut traversal: Vec<u32> = Vec::new();
        let mut signs: BTreeMap<u32, i8> = BTreeMap::new();
        let mut pluses: BTreeMap<u32, u8> = BTreeMap::new();
        let mut anchors: BTreeMap<u32, u8> = BTreeMap::new();
        let mut basepoint: u32 = 1;
        let mut transversals: BTreeMap<u32, Side> = BTreeMap::new();
        let mut annuli: Vec<(usize, usize)> = Vec::new();
        let mut defects: Vec<i64> = Vec::new();

        let syntax = |line: usize, msg: &str| DiagramError::Syntax {
            line,
            msg: msg.to_string(),
        };

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tok = line.split_whitespace();
            let key = tok.next().unwrap();
            let rest: Vec<&str> = tok.collect();
            match key {
                "genus" => {
                    genus = Some(
                        rest.first()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| syntax(line_no, "genus <non-negative int>"))?,
                    )
                }
                "euler" => {
                    euler = Some(
                        rest.first()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| syntax(line_no, "euler <int>"))?,
                    )
                }
                "traversal" => {
                    traversal = rest
                        .iter()
                        .map(|s| s.parse::<u32>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| syntax(line_no, "traversal <crossing ids>"))?;
                }
                "sign" => {
                    let id: u32 = rest
                        .first()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| syntax(line_no, "sign <crossing> <+|->"))?;
                    let s = match rest.get(1).copied() {
                        Some("+") | Some("+1") => 1,
                        Some("-") | Some("-1") => -1,
                        _ => return Err(syntax(line_no, "sign <crossing> <+|->")),
                    };
                    signs.insert(id, s);
                }
                "plus" => {
                    let id: u32 = rest
                        .first()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| syntax(line_no, "plus <crossing> <0|1>"))?;
                    let p: u8 = rest
                        .get(1)
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| syntax(line_no, "plus <crossing> <0|1>"))?;
                    pluses.insert(id, p);
                }
                "anchor" => {
                    let id: u32 = rest
                        .first()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| syntax(line_no, "anchor <crossing> <quadrant 0..3>"))?;
                    let a: u8 = rest
                        .get(1)
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| syntax(line_no, "anchor <crossing> <quadrant 0..3>"))?;
                    anchors.insert(id, a);
                }
                "basepoint" => {
                    basepoint = rest
                        .first()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| syntax(line_no, "basepoint <edge index>"))?;
                }
                "defects" => {
                    defects = rest
                        .iter()
                        .map(|s| s.parse::<i64>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| syntax(line_no, "defects <ints>"))?;
                }
                "transversal" => {
                    let name = rest
                        .first()
                        .copied()
                        .ok_or_else(|| syntax(line_no, "transversal c<i> <left|right>"))?;
                    let idx: u32 = name
                        .strip_prefix('c')
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| syntax(line_no, "transversal c<i> <left|right>"))?;
                    let side = match rest.get(1).copied() {
                        Some("left") => Side::Left,
                        Some("right") => Side::Right,
                        _ => return Err(syntax(line_no, "transversal c<i> <left|right>")),
                    };
                    transversals.insert(idx, side);
                }
                "annulus" => {
                    let a: usize = rest
                        .first()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| syntax(line_no, "annulus <orbit> <orbit>"))?;
                    let b: usize = rest
                        .get(1)
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| syntax(line_no, "annulus <orbit> <orbit>"))?;
                    annuli.push((a, b));
                }
                other => {
                    return Err(syntax(line_no, &format!("unknown directive `{other}`")));
                }
            }
        }

        let genus = genus.ok_or_else(|| syntax(0, "missing `genus` line"))?;
        let euler = euler.ok_or_else(|| syntax(0, "missing `euler` line"))?;
        if traversal.is_empty() {
            return Err(DiagramError::EmptyTraversal);
        }

        let mut ids: Vec<u32> = traversal.clone();
        ids.sort_unstable();
        ids.dedup();
        let mut crossings = Vec::new();
        for id in ids {
            let sign = *signs
                .get(&id)
                .ok_or(DiagramError::MissingDecoration {
                    field: "sign",
                    crossing: id,
                })?;
            let plus_pair = *pluses.get(&id).ok_or(DiagramError::MissingDecoration {
                field: "plus",
                crossing: id,
            })?;
            let anchor = *anchors.get(&id).ok_or(DiagramError::MissingDecoration {
                field: "anchor",
                crossing: id,
            })?;
            crossings.push(Crossing {
                id,
                sign,
                plus_pair,
                anchor,
            });
        }

        Diagram::build(
            genus,
            euler,
            traversal,
            crossings,
            basepoint,
            transversals,
            annuli,
            defects,
        )
    }

    /// Canonical file form; `parse(serialize(d))` reproduces `d`.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "genus {}", self.genus);
        let _ = writeln!(s, "euler {}", self.euler);
        let trav: Vec<String> = self.traversal.iter().map(|t| t.to_string()).collect();
        let _ = writeln!(s, "traversal {}", trav.join(" "));
        for c in &self.crossings {
            let _ = writeln!(s, "sign {} {}", c.id, if c.sign >= 0 { "+" } else { "-" });
        }
        for c in &self.crossings {
            let _ = writeln!(s, "plus {} {}", c.id, c.plus_pair);
        }
        for c in &self.crossings {
            let _ = writeln!(s, "anchor {} {}", c.id, c.anchor);
        }
        let _ = writeln!(s, "basepoint {}", self.basepoint);
        for (idx, side) in &self.transversals {
            let _ = writeln!(
                s,
                "transversal c{} {}",
                idx,
                match side {
                    Side::Left => "left",
                    Side::Right => "right",
                }
            );
        }
        for &(a, b) in &self.annuli {
            let _ = writeln!(s, "annulus {a} {b}");
        }
        let defects: Vec<String> = self.regions.iter().map(|r| r.defect.to_string()).collect();
        let _ = writeln!(s, "defects {}", defects.join(" "));
        s
    }

    /// Human-readable region listing: each region with its orbit walks given
    /// as edge/side itineraries and its corner count.
    pub fn describe_regions(&self) -> String {
        let mut s = String::new();
        let corners = self.region_corner_counts();
        for (ri, region) in self.regions.iter().enumerate() {
            let kind = if region.is_disk() { "disk" } else { "annulus" };
            let _ = writeln!(
                s,
                "region {ri} ({kind}, {} corner(s), defect {}):",
                corners[ri], region.defect
            );
            for &oi in &region.orbits {
                let walk: Vec<String> = self.orbits[oi]
                    .iter()
                    .map(|&de| {
                        let e = &self.edges[de / 2];
                        if de % 2 == 0 {
                            format!("e{}+", e.seq)
                        } else {
                            format!("e{}-", e.seq)
                        }
                    })
                    .collect();
                let _ = writeln!(s, "  boundary: {}", walk.join(" "));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The one-crossing figure-eight diagram used throughout: with sign `-`
    /// it has two monogon lobes and one 2-gon region.
    pub fn figure_eight(euler: i64, defects: [i64; 3]) -> Diagram {
        Diagram::build(
            0,
            euler,
            vec![1, 1],
            vec![Crossing {
                id: 1,
                sign: -1,
                plus_pair: 0,
                anchor: 1,
            }],
            1,
            BTreeMap::new(),
            Vec::new(),
            defects.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn figure_eight_faces() {
        let d = figure_eight(-5, [-1, -3, -1]);
        assert_eq!(d.regions.len(), 3);
        let corners = d.region_corner_counts();
        // Two monogon lobes, one 2-gon.
        assert_eq!(corners, vec![1, 2, 1]);
        assert!(d.validate().is_empty());
    }

    #[test]
    fn figure_eight_quadrant_assignment() {
        let d = figure_eight(-5, [-1, -3, -1]);
        // Lobes cover the opposite pair {0, 2}; the 2-gon covers {1, 3}.
        assert_eq!(d.quadrant_region(0, 0), 0);
        assert_eq!(d.quadrant_region(0, 2), 2);
        assert_eq!(d.quadrant_region(0, 1), 1);
        assert_eq!(d.quadrant_region(0, 3), 1);
        // anchor 1: quadrants 1, 3 carry a+, so 0, 2 carry b+ = a-.
        assert_eq!(d.pos_letter(0, 1).kind, GenKind::A);
        assert_eq!(d.pos_letter(0, 0).kind, GenKind::B);
        assert_eq!(d.neg_letter(0, 1).kind, GenKind::B);
        // plus pair 0: the lobes are decorated.
        assert!(d.is_plus(0, 0) && d.is_plus(0, 2));
        assert!(!d.is_plus(0, 1));
    }

    #[test]
    fn special_points_alternate() {
        let d = figure_eight(-5, [-1, -3, -1]);
        assert_eq!(d.edges[0].special, Letter::new(GenKind::C, 1));
        assert_eq!(d.edges[1].special, Letter::new(GenKind::D, 1));
    }

    #[test]
    fn euler_violation_reported() {
        // Declare genus 1 for a spherical diagram: Euler check must fire.
        let d = Diagram::build(
            1,
            -5,
            vec![1, 1],
            vec![Crossing {
                id: 1,
                sign: -1,
                plus_pair: 0,
                anchor: 1,
            }],
            1,
            BTreeMap::new(),
            Vec::new(),
            vec![-1, -3, -1],
        )
        .unwrap();
        let report = d.validate();
        assert!(report.iter().any(|v| v.contains("Euler formula")));
    }

    #[test]
    fn defect_sum_violation_reported() {
        let d = figure_eight(-5, [-1, -3, 0]);
        let report = d.validate();
        assert!(report.iter().any(|v| v.contains("defect sum")));
    }

    #[test]
    fn open_traversal_rejected() {
        let err = Diagram::parse("genus 0\neuler -1\ntraversal 1\nsign 1 -\nplus 1 0\nanchor 1 1\ndefects 0");
        assert!(matches!(err, Err(DiagramError::OpenTraversal(1, 1))));
    }

    #[test]
    fn parse_serialize_roundtrip() {
        let d = figure_eight(-5, [-1, -3, -1]);
        let text = d.serialize();
        let d2 = Diagram::parse(&text).unwrap();
        assert_eq!(d2.serialize(), text);
        assert_eq!(d2.traversal, d.traversal);
        assert_eq!(
            d2.regions.iter().map(|r| r.defect).collect::<Vec<_>>(),
            d.regions.iter().map(|r| r.defect).collect::<Vec<_>>()
        );
    }

    #[test]
    fn face_walks_close() {
        let d = figure_eight(-5, [-1, -3, -1]);
        for orbit in &d.orbits {
            for (i, &de) in orbit.iter().enumerate() {
                let next = orbit[(i + 1) % orbit.len()];
                assert_eq!(d.face_next(de), next);
            }
        }
    }
}
