//! Enumeration of the admissible immersed marked disks feeding the external
//! differential.
//!
//! A disk is recorded by its rooted boundary walk: the marked positive
//! corner (a quadrant for `a`/`b` generators, a directed passage through the
//! edge point for `d` generators), the directed edges of the boundary in
//! counterclockwise order, and the transition (convex corner or straight
//! pass) at the head of each edge. The disk itself is reconstructed from the
//! walk by solving for region multiplicities and checking the gluing counts:
//! every edge and quadrant must carry a consistent non-negative number of
//! interior sheets and the assembled surface must have Euler characteristic
//! one.
//!
//! Walks are pruned by explicit budgets; running out of walk length or
//! multiplicity sets a loud incompleteness flag rather than silently
//! truncating. Disks whose defect drops below the requested bound are pure
//! truncation and do not mark the enumeration incomplete.

use crate::algebra::{Factor, GenKind, Letter};
use crate::diagram::{Diagram, DirEdge};
use crate::grading::solve_chain;

#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    /// Maximum boundary walk length in directed edges.
    pub max_walk: usize,
    /// Maximum region multiplicity.
    pub max_mult: u32,
    /// Maximum `T`-power (= -defect) of an emitted disk.
    pub max_t: u32,
}

impl SearchBudget {
    pub fn for_truncation(k: u32) -> Self {
        SearchBudget {
            max_walk: 64,
            max_mult: 4,
            max_t: k,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Trans {
    Corner,
    Straight,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Root {
    /// Positive corner at a quadrant of a crossing (`a` and `b` series).
    Corner { crossing: usize, quadrant: usize },
    /// Marked smooth passage through a `d` point, entering along the given
    /// directed edge.
    Point { de: DirEdge },
}

/// A rooted boundary walk; two marked disks are equivalent exactly when
/// their rooted walks coincide.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct DiskClass {
    pub root: Root,
    pub des: Vec<DirEdge>,
    /// Transition at the head of each directed edge. Corner roots close at
    /// the marked corner, so they carry `des.len() - 1` transitions; point
    /// roots carry `des.len()`, the last one leading back into `des[0]`.
    pub transitions: Vec<Trans>,
}

/// A validated disk with its differential data.
#[derive(Clone, Debug)]
pub struct Disk {
    pub class: DiskClass,
    /// Region multiplicities of the immersion.
    pub multiplicities: Vec<i64>,
    /// Chord-adjusted defect; always <= 0.
    pub defect: i64,
    /// Word factors in counterclockwise order from the marked point.
    pub factors: Vec<Factor>,
    pub t_power: u32,
}

#[derive(Clone, Debug, Default)]
pub struct Enumeration {
    pub disks: Vec<Disk>,
    /// Unset when some branch was cut by the walk or multiplicity budget, so
    /// disks beyond the budget may exist.
    pub complete: bool,
}

#[derive(thiserror::Error, Debug)]
pub enum DiskError {
    #[error("site {0} is not a generator admitting external disks")]
    BadSite(Letter),
    #[error("enumerated a disk with positive defect {0}; this contradicts the defect bound")]
    PositiveDefect(i64),
    #[error("oracle guard: {0}")]
    OracleGuard(String),
}

/// Enumerate all admissible disks with positive corner at `x` (kind `a`, `b`
/// or `d`), up to the budget.
pub fn enumerate_ext_disks(
    d: &Diagram,
    x: Letter,
    budget: &SearchBudget,
) -> Result<Enumeration, DiskError> {
    let mut out = Enumeration {
        disks: Vec::new(),
        complete: true,
    };
    match x.kind {
        GenKind::A | GenKind::B => {
            let crossing = d
                .crossing_index(x.site)
                .ok_or(DiskError::BadSite(x))?;
            for q in 0..4 {
                if d.pos_letter(crossing, q) == x {
                    let root = Root::Corner {
                        crossing,
                        quadrant: q,
                    };
                    walk_from_root(d, root, budget, &mut out)?;
                }
            }
        }
        GenKind::D => {
            let edge = d
                .edge_of_special(x)
                .ok_or(DiskError::BadSite(x))?;
            for dir in 0..2 {
                let root = Root::Point { de: 2 * edge + dir };
                walk_from_root(d, root, budget, &mut out)?;
            }
        }
        GenKind::C => return Err(DiskError::BadSite(x)),
    }
    Ok(out)
}

struct WalkState<'a> {
    d: &'a Diagram,
    budget: &'a SearchBudget,
    root: Root,
    des: Vec<DirEdge>,
    transitions: Vec<Trans>,
    w: Vec<u32>,
    /// Per-region walk-forced multiplicity lower bound.
    cover_lb: Vec<u32>,
    /// Running count of negative corners at `+`-decorated quadrants.
    decorated_corners: i64,
}

impl WalkState<'_> {
    /// An upper bound for the final defect of any completion of this prefix.
    fn defect_upper_bound(&self) -> i64 {
        let mut ub = 0i64;
        for (r, region) in self.d.regions.iter().enumerate() {
            if region.defect < 0 {
                ub += region.defect * self.cover_lb[r] as i64;
            } else if region.defect > 0 {
                ub += region.defect * self.budget.max_mult as i64;
            }
        }
        ub -= self.decorated_corners;
        if let Root::Corner { crossing, quadrant } = self.root {
            if !self.d.is_plus(crossing, quadrant) {
                ub += 1;
            }
        }
        ub
    }
}

fn walk_from_root(
    d: &Diagram,
    root: Root,
    budget: &SearchBudget,
    out: &mut Enumeration,
) -> Result<(), DiskError> {
    let first_de = match root {
        Root::Corner { crossing, quadrant } => {
            let (u, _) = d.quadrant_rays(crossing, quadrant);
            d.de_from_ray(u)
        }
        Root::Point { de } => de,
    };
    let mut st = WalkState {
        d,
        budget,
        root,
        des: Vec::new(),
        transitions: Vec::new(),
        w: vec![0; 2 * d.num_edges()],
        cover_lb: vec![0; d.regions.len()],
        decorated_corners: 0,
    };
    push_de(&mut st, first_de, out)?;
    dfs(&mut st, out)?;
    pop_de(&mut st);
    Ok(())
}

fn push_de(st: &mut WalkState, de: DirEdge, out: &mut Enumeration) -> Result<bool, DiskError> {
    if st.w[de] >= st.budget.max_mult {
        out.complete = false;
        return Ok(false);
    }
    if st.des.len() >= st.budget.max_walk {
        out.complete = false;
        return Ok(false);
    }
    st.des.push(de);
    st.w[de] += 1;
    let left = st.d.region_of_de(de);
    st.cover_lb[left] = st.cover_lb[left].max(st.w[de]);
    Ok(true)
}

fn pop_de(st: &mut WalkState) {
    let de = st.des.pop().expect("pop matches push");
    st.w[de] -= 1;
    // Recompute the affected region's lower bound.
    let left = st.d.region_of_de(de);
    let mut lb = 0;
    for (other, &w) in st.w.iter().enumerate() {
        if st.d.region_of_de(other) == left {
            lb = lb.max(w);
        }
    }
    st.cover_lb[left] = lb;
}

fn dfs(st: &mut WalkState, out: &mut Enumeration) -> Result<(), DiskError> {
    if -st.defect_upper_bound() > st.budget.max_t as i64 {
        return Ok(());
    }
    let de = *st.des.last().expect("walk is nonempty");
    let head = st.d.de_head_ray(de);

    // Closing moves.
    match st.root {
        Root::Corner { crossing, quadrant } => {
            let (_, v) = st.d.quadrant_rays(crossing, quadrant);
            if head == v {
                finish(st, out)?;
            }
        }
        Root::Point { de: root_de } => {
            // Close through either transition that leads back into the root
            // edge passage.
            for (trans, next) in [
                (Trans::Corner, st.d.corner_next(de)),
                (Trans::Straight, st.d.straight_next(de)),
            ] {
                if next == root_de {
                    st.transitions.push(trans);
                    let dec = trans == Trans::Corner && {
                        let (x, q) = corner_quadrant(st.d, head);
                        st.d.is_plus(x, q)
                    };
                    if dec {
                        st.decorated_corners += 1;
                    }
                    finish(st, out)?;
                    if dec {
                        st.decorated_corners -= 1;
                    }
                    st.transitions.pop();
                }
            }
        }
    }

    // Continuing moves.
    for (trans, next) in [
        (Trans::Corner, st.d.corner_next(de)),
        (Trans::Straight, st.d.straight_next(de)),
    ] {
        st.transitions.push(trans);
        let dec = trans == Trans::Corner && {
            let (x, q) = corner_quadrant(st.d, head);
            st.d.is_plus(x, q)
        };
        if dec {
            st.decorated_corners += 1;
        }
        if push_de(st, next, out)? {
            dfs(st, out)?;
            pop_de(st);
        }
        if dec {
            st.decorated_corners -= 1;
        }
        st.transitions.pop();
    }
    Ok(())
}

/// Quadrant covered by a convex corner at arrival ray `head`.
fn corner_quadrant(d: &Diagram, head: usize) -> (usize, usize) {
    d.quadrant_of_first_ray(d.sigma_inv(head))
}

fn finish(st: &mut WalkState, out: &mut Enumeration) -> Result<(), DiskError> {
    let class = DiskClass {
        root: st.root,
        des: st.des.clone(),
        transitions: st.transitions.clone(),
    };
    if let Some(disk) = validate(st.d, &class, st.budget)? {
        if -disk.defect <= st.budget.max_t as i64 {
            out.disks.push(disk);
        }
    }
    Ok(())
}

/// Reconstruct the immersion data of a rooted walk: region multiplicities,
/// sheet counts, Euler characteristic, defect, and word factors. Returns
/// `None` when the walk bounds no immersed disk within the multiplicity
/// budget.
pub fn validate(
    d: &Diagram,
    class: &DiskClass,
    budget: &SearchBudget,
) -> Result<Option<Disk>, DiskError> {
    // Boundary counts.
    let mut w = vec![0i64; 2 * d.num_edges()];
    for &de in &class.des {
        w[de] += 1;
    }
    let mut gamma = vec![0i64; d.num_edges()];
    for e in 0..d.num_edges() {
        gamma[e] = w[2 * e] - w[2 * e + 1];
    }
    let Some(m0) = solve_chain(d, &gamma) else {
        return Ok(None);
    };

    // Quadrant coverage by the boundary.
    let mut cover = vec![[0i64; 4]; d.num_crossings()];
    let mut corners: Vec<(usize, usize)> = Vec::new();
    if let Root::Corner { crossing, quadrant } = class.root {
        cover[crossing][quadrant] += 1;
    }
    for (i, &trans) in class.transitions.iter().enumerate() {
        let head = d.de_head_ray(class.des[i]);
        match trans {
            Trans::Corner => {
                let (x, q) = corner_quadrant(d, head);
                cover[x][q] += 1;
                corners.push((x, q));
            }
            Trans::Straight => {
                let (x1, q1) = corner_quadrant(d, head);
                cover[x1][q1] += 1;
                // Left-front quadrant: corner at sigma^2(head) as first ray.
                let (x2, q2) = d.quadrant_of_first_ray(d.sigma(d.sigma(head)));
                debug_assert_eq!(x1, x2);
                cover[x2][q2] += 1;
            }
        }
    }

    // Candidate multiplicity shifts: m = m0 + t, smallest valid t wins.
    let min0 = *m0.iter().min().expect("regions nonempty");
    let max0 = *m0.iter().max().expect("regions nonempty");
    let t_lo = -min0;
    let t_hi = budget.max_mult as i64 - max0;
    let mut chosen: Option<Vec<i64>> = None;
    't: for t in t_lo..=t_hi {
        let m: Vec<i64> = m0.iter().map(|&v| v + t).collect();
        // Non-disk regions cannot carry interior sheets of a disk.
        for (r, region) in d.regions.iter().enumerate() {
            if !region.is_disk() && m[r] != 0 {
                continue 't;
            }
        }
        // Interior sheets over edges.
        let mut sum_i_e = 0i64;
        for e in 0..d.num_edges() {
            let left = d.region_of_de(2 * e);
            let right = d.region_of_de(2 * e + 1);
            let i_fwd = m[left] - w[2 * e];
            let i_bwd = m[right] - w[2 * e + 1];
            if i_fwd < 0 || i_bwd != i_fwd {
                continue 't;
            }
            sum_i_e += i_fwd;
        }
        // Interior sheets through crossings: consistent across quadrants.
        let mut sum_i_x = 0i64;
        for x in 0..d.num_crossings() {
            let mut i_x: Option<i64> = None;
            for q in 0..4 {
                let sheets = m[d.quadrant_region(x, q)] - cover[x][q];
                if sheets < 0 {
                    continue 't;
                }
                match i_x {
                    None => i_x = Some(sheets),
                    Some(prev) if prev == sheets => {}
                    _ => continue 't,
                }
            }
            sum_i_x += i_x.unwrap_or(0);
        }
        // Euler characteristic of the assembled surface must be a disk's.
        let chi = sum_i_x - sum_i_e + m.iter().sum::<i64>();
        if chi != 1 {
            continue 't;
        }
        chosen = Some(m);
        break;
    }
    let Some(m) = chosen else {
        return Ok(None);
    };

    // Defect: weighted region defects with corner adjustments.
    let mut defect: i64 = m
        .iter()
        .enumerate()
        .map(|(r, &mult)| mult * d.regions[r].defect)
        .sum();
    if let Root::Corner { crossing, quadrant } = class.root {
        if !d.is_plus(crossing, quadrant) {
            defect += 1;
        }
    }
    for &(x, q) in &corners {
        if d.is_plus(x, q) {
            defect -= 1;
        }
    }
    if defect > 0 {
        return Err(DiskError::PositiveDefect(defect));
    }

    // Word factors counterclockwise from the marked point. For corner roots
    // the first edge's special point comes first; for point roots the root
    // edge's special point is the marked `d` itself and contributes nothing.
    let mut factors = Vec::new();
    let n = class.des.len();
    for i in 0..n {
        if !(i == 0 && matches!(class.root, Root::Point { .. })) {
            let de = class.des[i];
            let sp = d.edges[de / 2].special;
            if sp.kind == GenKind::C {
                factors.push(Factor::OnePlusC {
                    site: sp.site,
                    inverse: !d.transversal_points_into_walk_left(de),
                });
            }
        }
        if i < class.transitions.len() && class.transitions[i] == Trans::Corner {
            let head = d.de_head_ray(class.des[i]);
            let (x, q) = corner_quadrant(d, head);
            factors.push(Factor::Gen(d.neg_letter(x, q)));
        }
    }

    Ok(Some(Disk {
        class: class.clone(),
        multiplicities: m,
        defect,
        factors,
        t_power: (-defect) as u32,
    }))
}

// ---------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------

/// Independent enumeration: iterate over all region-multiplicity vectors
/// under the cap, derive admissible boundary counts and transition splits
/// from the gluing equations, assemble rooted walks Eulerian-style, and keep
/// those that validate. Guarded to small inputs.
pub fn oracle_enumerate(
    d: &Diagram,
    x: Letter,
    budget: &SearchBudget,
) -> Result<Vec<Disk>, DiskError> {
    if d.num_crossings() > 5 {
        return Err(DiskError::OracleGuard(format!(
            "diagram has {} crossings; oracle is limited to 5",
            d.num_crossings()
        )));
    }
    if budget.max_mult > 3 {
        return Err(DiskError::OracleGuard(format!(
            "multiplicity cap {} exceeds the oracle guard of 3",
            budget.max_mult
        )));
    }
    let n_regions = d.regions.len();
    let mut classes: std::collections::BTreeSet<DiskClass> = std::collections::BTreeSet::new();
    let mut m = vec![0i64; n_regions];
    enumerate_mult_vectors(d, x, budget, 0, &mut m, &mut classes)?;
    let mut disks = Vec::new();
    for class in classes {
        if let Some(disk) = validate(d, &class, budget)? {
            if -disk.defect <= budget.max_t as i64 {
                disks.push(disk);
            }
        }
    }
    Ok(disks)
}

fn enumerate_mult_vectors(
    d: &Diagram,
    x: Letter,
    budget: &SearchBudget,
    r: usize,
    m: &mut Vec<i64>,
    classes: &mut std::collections::BTreeSet<DiskClass>,
) -> Result<(), DiskError> {
    if r == m.len() {
        if m.iter().all(|&v| v == 0) {
            return Ok(());
        }
        walks_for_multiplicity(d, x, budget, m, classes);
        return Ok(());
    }
    let cap = if d.regions[r].is_disk() {
        budget.max_mult as i64
    } else {
        0
    };
    for v in 0..=cap {
        m[r] = v;
        enumerate_mult_vectors(d, x, budget, r + 1, m, classes)?;
    }
    m[r] = 0;
    Ok(())
}

/// All rooted walks realizing the multiplicity vector `m`.
fn walks_for_multiplicity(
    d: &Diagram,
    x: Letter,
    budget: &SearchBudget,
    m: &[i64],
    classes: &mut std::collections::BTreeSet<DiskClass>,
) {
    // Boundary counts per directed edge: w[e+] - w[e-] = m_left - m_right,
    // 0 <= w[e+] <= m_left, 0 <= w[e-] <= m_right.
    let mut w = vec![0i64; 2 * d.num_edges()];
    fn rec(
        d: &Diagram,
        x: Letter,
        budget: &SearchBudget,
        m: &[i64],
        e: usize,
        w: &mut Vec<i64>,
        classes: &mut std::collections::BTreeSet<DiskClass>,
    ) {
        if e == d.num_edges() {
            splits_and_walks(d, x, budget, m, w, classes);
            return;
        }
        let left = d.region_of_de(2 * e);
        let right = d.region_of_de(2 * e + 1);
        let delta = m[left] - m[right];
        let lo = 0.max(-delta);
        let hi = m[right].min(m[left] - delta);
        let mut back = lo;
        while back <= hi {
            w[2 * e] = delta + back;
            w[2 * e + 1] = back;
            rec(d, x, budget, m, e + 1, w, classes);
            back += 1;
        }
        w[2 * e] = 0;
        w[2 * e + 1] = 0;
    }
    rec(d, x, budget, m, 0, &mut w, classes);
}

/// Given multiplicities and boundary counts, enumerate corner/straight
/// splits satisfying the quadrant equations, then assemble rooted walks.
fn splits_and_walks(
    d: &Diagram,
    x: Letter,
    budget: &SearchBudget,
    m: &[i64],
    w: &[i64],
    classes: &mut std::collections::BTreeSet<DiskClass>,
) {
    // Arrival count at each ray = w of the directed edge whose head it is.
    let n_rays = 4 * d.num_crossings();
    let mut arrivals = vec![0i64; n_rays];
    for ray in 0..n_rays {
        arrivals[ray] = w[d.de_into_ray(ray)];
    }
    // Choose straight counts s[ray] in 0..=arrivals[ray]; corner counts are
    // the rest. Quadrant (u, sigma u) coverage:
    //   root contribution + arrivals(sigma u) + s(sigma^2 u) = m[F] - i_x,
    // with i_x >= 0 constant per crossing.
    let mut s = vec![0i64; n_rays];
    fn rec_splits(
        d: &Diagram,
        x: Letter,
        budget: &SearchBudget,
        m: &[i64],
        w: &[i64],
        arrivals: &[i64],
        ray: usize,
        s: &mut Vec<i64>,
        classes: &mut std::collections::BTreeSet<DiskClass>,
    ) {
        let n_rays = arrivals.len();
        if ray == n_rays {
            assemble_walks(d, x, budget, m, w, arrivals, s, classes);
            return;
        }
        for v in 0..=arrivals[ray] {
            s[ray] = v;
            rec_splits(d, x, budget, m, w, arrivals, ray + 1, s, classes);
        }
        s[ray] = 0;
    }
    rec_splits(d, x, budget, m, w, &arrivals, 0, &mut s, classes);
    let _ = budget;
}

/// With full transition counts fixed, walk Eulerian-style from each possible
/// root, consuming transitions; a walk that closes with every transition
/// consumed is a candidate class.
#[allow(clippy::too_many_arguments)]
fn assemble_walks(
    d: &Diagram,
    x: Letter,
    budget: &SearchBudget,
    m: &[i64],
    w: &[i64],
    arrivals: &[i64],
    s: &[i64],
    classes: &mut std::collections::BTreeSet<DiskClass>,
) {
    let _ = arrivals;
    let total: i64 = w.iter().sum();
    if total == 0 || total as usize > budget.max_walk {
        return;
    }
    let _ = m;
    match x.kind {
        GenKind::A | GenKind::B => {
            let Some(crossing) = d.crossing_index(x.site) else {
                return;
            };
            for q in 0..4 {
                if d.pos_letter(crossing, q) != x {
                    continue;
                }
                let root = Root::Corner {
                    crossing,
                    quadrant: q,
                };
                let (u, _) = d.quadrant_rays(crossing, q);
                let first = d.de_from_ray(u);
                euler_walk(d, root, first, w, s, classes);
            }
        }
        GenKind::D => {
            let Some(edge) = d.edge_of_special(x) else {
                return;
            };
            for dir in 0..2 {
                let de = 2 * edge + dir;
                if w[de] > 0 {
                    euler_walk(d, Root::Point { de }, de, w, s, classes);
                }
            }
        }
        GenKind::C => {}
    }
}

fn euler_walk(
    d: &Diagram,
    root: Root,
    first: DirEdge,
    w: &[i64],
    s: &[i64],
    classes: &mut std::collections::BTreeSet<DiskClass>,
) {
    let mut w_left = w.to_vec();
    let mut s_left = s.to_vec();
    // Corner budget per ray.
    let n_rays = s.len();
    let mut c_left = vec![0i64; n_rays];
    for ray in 0..n_rays {
        c_left[ray] = w[d.de_into_ray(ray)] - s[ray];
        if c_left[ray] < 0 {
            return;
        }
    }
    if w_left[first] == 0 {
        return;
    }
    w_left[first] -= 1;
    let mut des = vec![first];
    let mut transitions = Vec::new();
    walk_rec(
        d,
        root,
        first,
        &mut w_left,
        &mut s_left,
        &mut c_left,
        &mut des,
        &mut transitions,
        classes,
    );
}

#[allow(clippy::too_many_arguments)]
fn walk_rec(
    d: &Diagram,
    root: Root,
    first: DirEdge,
    w_left: &mut Vec<i64>,
    s_left: &mut Vec<i64>,
    c_left: &mut Vec<i64>,
    des: &mut Vec<DirEdge>,
    transitions: &mut Vec<Trans>,
    classes: &mut std::collections::BTreeSet<DiskClass>,
) {
    let de = *des.last().unwrap();
    let head = d.de_head_ray(de);

    // Closing.
    match root {
        Root::Corner { crossing, quadrant } => {
            // The closing arrival at the marked corner consumes no
            // transition, so exactly one split unit must remain, at the
            // arrival ray of the root quadrant.
            let (_, v) = d.quadrant_rays(crossing, quadrant);
            let leftover: i64 = s_left.iter().sum::<i64>() + c_left.iter().sum::<i64>();
            if head == v
                && w_left.iter().all(|&x| x == 0)
                && leftover == 1
                && s_left[v] + c_left[v] == 1
            {
                classes.insert(DiskClass {
                    root,
                    des: des.clone(),
                    transitions: transitions.clone(),
                });
            }
        }
        Root::Point { .. } => {
            for (trans, pool) in [(Trans::Corner, 0usize), (Trans::Straight, 1usize)] {
                let next = match trans {
                    Trans::Corner => d.corner_next(de),
                    Trans::Straight => d.straight_next(de),
                };
                if next != first {
                    continue;
                }
                let avail = if pool == 0 {
                    &mut c_left[head]
                } else {
                    &mut s_left[head]
                };
                if *avail == 0 {
                    continue;
                }
                *avail -= 1;
                let closed_clean = w_left.iter().all(|&v| v == 0)
                    && s_left.iter().all(|&v| v == 0)
                    && c_left.iter().all(|&v| v == 0);
                if closed_clean {
                    let mut t2 = transitions.clone();
                    t2.push(trans);
                    classes.insert(DiskClass {
                        root,
                        des: des.clone(),
                        transitions: t2,
                    });
                }
                if pool == 0 {
                    c_left[head] += 1;
                } else {
                    s_left[head] += 1;
                }
            }
        }
    }

    // Continuing.
    for trans in [Trans::Corner, Trans::Straight] {
        let next = match trans {
            Trans::Corner => d.corner_next(de),
            Trans::Straight => d.straight_next(de),
        };
        let avail = match trans {
            Trans::Corner => c_left[head],
            Trans::Straight => s_left[head],
        };
        if avail == 0 || w_left[next] == 0 {
            continue;
        }
        match trans {
            Trans::Corner => c_left[head] -= 1,
            Trans::Straight => s_left[head] -= 1,
        }
        w_left[next] -= 1;
        des.push(next);
        transitions.push(trans);
        walk_rec(
            d, root, first, w_left, s_left, c_left, des, transitions, classes,
        );
        transitions.pop();
        des.pop();
        w_left[next] += 1;
        match trans {
            Trans::Corner => c_left[head] += 1,
            Trans::Straight => s_left[head] += 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Renderer;
    use crate::diagram::{Crossing, Diagram};
    use std::collections::BTreeMap;

    fn whitehead(p: i64) -> Diagram {
        Diagram::build(
            0,
            -p,
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
            vec![-1, 2 - p, -1],
        )
        .unwrap()
    }

    fn render(d: &Diagram, disk: &Disk) -> String {
        let r = Renderer {
            short_names: d.num_crossings() == 1,
        };
        let t = crate::algebra::FactoredTerm {
            factors: disk.factors.clone(),
            t_power: disk.t_power,
        };
        r.factored_term(&t)
    }

    #[test]
    fn simple_example_b_disks() {
        let d = whitehead(5);
        let budget = SearchBudget::for_truncation(3);
        let e = enumerate_ext_disks(&d, Letter::new(GenKind::B, 1), &budget).unwrap();
        let mut terms: Vec<String> = e.disks.iter().map(|k| render(&d, k)).collect();
        terms.sort();
        assert_eq!(terms, vec!["(1+c) T", "T"], "partial b = T + (1+c)T");
        for disk in &e.disks {
            assert_eq!(disk.defect, -1);
            assert!(disk.class.transitions.is_empty(), "lobes have no corners");
        }
    }

    #[test]
    fn simple_example_a_disks() {
        let d = whitehead(5);
        let budget = SearchBudget::for_truncation(3);
        let e = enumerate_ext_disks(&d, Letter::new(GenKind::A, 1), &budget).unwrap();
        let mut terms: Vec<String> = e.disks.iter().map(|k| render(&d, k)).collect();
        terms.sort();
        assert_eq!(
            terms,
            vec!["(1+c)^-1 b T^2", "b (1+c)^-1 T^2"],
            "partial a = b(1+c)^-1 T^{{p-3}} + (1+c)^-1 b T^{{p-3}} at p = 5"
        );
        for disk in &e.disks {
            assert_eq!(disk.defect, -2, "defect 3 - p at p = 5");
        }
    }

    #[test]
    fn simple_example_d_disks() {
        let d = whitehead(5);
        let budget = SearchBudget::for_truncation(3);
        let e = enumerate_ext_disks(&d, Letter::new(GenKind::D, 1), &budget).unwrap();
        let mut terms: Vec<String> = e.disks.iter().map(|k| render(&d, k)).collect();
        terms.sort();
        assert_eq!(
            terms,
            vec!["a T^2", "b (1+c)^-1 b T^3"],
            "partial d = aT^2 + b(1+c)^-1 b T^{{p-2}} at p = 5"
        );
    }

    #[test]
    fn no_c_disks() {
        let d = whitehead(5);
        let budget = SearchBudget::for_truncation(3);
        assert!(matches!(
            enumerate_ext_disks(&d, Letter::new(GenKind::C, 1), &budget),
            Err(DiskError::BadSite(_))
        ));
    }

    #[test]
    fn every_disk_has_nonpositive_defect() {
        let d = whitehead(5);
        let budget = SearchBudget::for_truncation(6);
        for kind in [GenKind::A, GenKind::B, GenKind::D] {
            let e = enumerate_ext_disks(&d, Letter::new(kind, 1), &budget).unwrap();
            for disk in &e.disks {
                assert!(disk.defect <= 0);
            }
        }
    }

    #[test]
    fn oracle_matches_walker_on_whitehead() {
        let d = whitehead(5);
        let budget = SearchBudget {
            max_walk: 48,
            max_mult: 3,
            max_t: 3,
        };
        for kind in [GenKind::A, GenKind::B, GenKind::D] {
            let x = Letter::new(kind, 1);
            let walker = enumerate_ext_disks(&d, x, &budget).unwrap();
            let oracle = oracle_enumerate(&d, x, &budget).unwrap();
            let mut wset: Vec<DiskClass> = walker.disks.iter().map(|k| k.class.clone()).collect();
            let mut oset: Vec<DiskClass> = oracle.iter().map(|k| k.class.clone()).collect();
            wset.sort();
            oset.sort();
            assert_eq!(wset, oset, "kind {kind:?}");
        }
    }

    #[test]
    fn unknot_b_disks_are_low_energy() {
        // Unknot: lobes have defect 0, so lobe disks land at T^0.
        let d = Diagram::build(
            0,
            -3,
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
            vec![0, -3, 0],
        )
        .unwrap();
        let budget = SearchBudget::for_truncation(3);
        let e = enumerate_ext_disks(&d, Letter::new(GenKind::B, 1), &budget).unwrap();
        let mut terms: Vec<String> = e.disks.iter().map(|k| render(&d, k)).collect();
        terms.sort();
        assert_eq!(terms, vec!["(1+c)", "1"]);
    }
}
