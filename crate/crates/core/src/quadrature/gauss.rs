//! Gauss–Legendre rules and the adaptive drivers built on them.

use num_complex::Complex64;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `order`-point rule by Newton iteration on `P_order`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "rule order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integral of `f` over `[a, b]` plus the matching integral of `|f|`.
    #[inline]
    pub(crate) fn apply<F: FnMut(f64) -> Complex64>(&self, f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(mid + half * x);
            acc += v * *w;
            mag += v.norm() * w;
        }
        (acc * half, mag * half.abs())
    }

    /// Tensor-product rule over `[a, b] x [c, d]`.
    #[inline]
    pub(crate) fn apply_2d<F: FnMut(f64, f64) -> Complex64>(
        &self,
        f: &mut F,
        (a, b): (f64, f64),
        (c, d): (f64, f64),
    ) -> (Complex64, f64) {
        let hx = 0.5 * (b - a);
        let mx = 0.5 * (a + b);
        let hy = 0.5 * (d - c);
        let my = 0.5 * (c + d);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        for (x, wx) in self.nodes.iter().zip(&self.weights) {
            for (y, wy) in self.nodes.iter().zip(&self.weights) {
                let v = f(mx + hx * x, my + hy * y);
                acc += v * (wx * wy);
                mag += v.norm() * wx * wy;
            }
        }
        (acc * (hx * hy), mag * (hx * hy).abs())
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Accumulated result of an adaptive run.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Adaptive {
    pub value: Complex64,
    pub error: f64,
    pub evals: usize,
    pub converged: bool,
}

impl Adaptive {
    pub fn new() -> Self {
        Adaptive {
            converged: true,
            ..Default::default()
        }
    }

    pub fn absorb(&mut self, other: &Adaptive) {
        self.value += other.value;
        self.error += other.error;
        self.evals += other.evals;
        self.converged &= other.converged;
    }
}

/// Relative size of round-off below which refinement stops.
const ROUNDOFF: f64 = 64.0 * f64::EPSILON;

pub(crate) struct Limits {
    pub tol: f64,
    pub max_depth: usize,
    pub min_depth: usize,
}

/// Upper bound on the number of live panels in one adaptive run.
const MAX_PANELS: usize = 40_000;

/// A panel together with its two-level estimate.
struct Panel<C, const K: usize> {
    depth: usize,
    parts: [(C, Complex64); K],
    sum: Complex64,
    diff: f64,
    settled_by_roundoff: bool,
}

impl<C, const K: usize> Panel<C, K> {
    /// Error that refinement can still reduce.
    fn reducible(&self) -> f64 {
        if self.settled_by_roundoff {
            0.0
        } else {
            self.diff
        }
    }
}

struct Ranked<C, const K: usize>(Panel<C, K>);

impl<C, const K: usize> PartialEq for Ranked<C, K> {
    fn eq(&self, other: &Self) -> bool {
        self.0.reducible().total_cmp(&other.0.reducible()).is_eq()
    }
}
impl<C, const K: usize> Eq for Ranked<C, K> {}
impl<C, const K: usize> PartialOrd for Ranked<C, K> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<C, const K: usize> Ord for Ranked<C, K> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.reducible().total_cmp(&other.0.reducible())
    }
}

/// Globally adaptive driver: panels are kept in a max-heap keyed by their
/// error estimate `|sum of children - parent|` and the worst one is split
/// until the total falls below `tol`. Panels whose discrepancy is at the
/// round-off level of `int |f|` carry no reducible error.
fn refine<C: Copy, const K: usize>(
    eval: &mut dyn FnMut(C) -> (Complex64, f64),
    split: &dyn Fn(C) -> Option<[C; K]>,
    order_evals: usize,
    root: C,
    limits: &Limits,
) -> Adaptive {
    let mut out = Adaptive::new();
    let (whole, _) = eval(root);
    out.evals += order_evals;
    let mut build = |cell: C, whole: Complex64, depth: usize, evals: &mut usize| -> Option<Panel<C, K>> {
        let kids = split(cell)?;
        let mut parts = [(cell, Complex64::new(0.0, 0.0)); K];
        let mut mag = 0.0;
        for (slot, kid) in parts.iter_mut().zip(kids) {
            let (v, m) = eval(kid);
            *slot = (kid, v);
            mag += m;
        }
        *evals += K * order_evals;
        let sum = parts.iter().map(|p| p.1).sum::<Complex64>();
        let diff = (sum - whole).norm();
        Some(Panel {
            depth,
            parts,
            sum,
            diff,
            settled_by_roundoff: diff <= ROUNDOFF * mag,
        })
    };

    let Some(first) = build(root, whole, 0, &mut out.evals) else {
        out.value = whole;
        return out;
    };
    // uniform refinement down to min_depth
    let mut frontier = vec![first];
    for depth in 1..=limits.min_depth.min(limits.max_depth) {
        let mut next = Vec::with_capacity(frontier.len() * K);
        for p in frontier {
            let kids: Option<Vec<_>> = p
                .parts
                .iter()
                .map(|&(cell, v)| build(cell, v, depth, &mut out.evals))
                .collect();
            match kids {
                Some(k) => next.extend(k),
                None => next.push(p),
            }
        }
        frontier = next;
    }
    let mut done_value = Complex64::new(0.0, 0.0);
    let mut done_error = 0.0;
    let mut done_reducible = 0.0;
    let mut live_reducible: f64 = frontier.iter().map(Panel::reducible).sum();
    let mut heap: std::collections::BinaryHeap<_> = frontier.into_iter().map(Ranked).collect();

    let finish = |p: &Panel<C, K>, value: &mut Complex64, error: &mut f64, red: &mut f64| {
        *value += p.sum;
        *error += p.diff;
        *red += p.reducible();
    };

    while let Some(Ranked(top)) = heap.peek() {
        let total = live_reducible + done_reducible;
        if total <= limits.tol || top.reducible() == 0.0 {
            break;
        }
        let Ranked(p) = heap.pop().expect("peeked");
        live_reducible -= p.reducible();
        let can_split = p.depth < limits.max_depth && heap.len() + K <= MAX_PANELS;
        let mut children = Vec::with_capacity(K);
        if can_split {
            for (cell, v) in p.parts {
                match build(cell, v, p.depth + 1, &mut out.evals) {
                    Some(c) => children.push(c),
                    None => {
                        children.clear();
                        break;
                    }
                }
            }
        }
        if children.is_empty() {
            finish(&p, &mut done_value, &mut done_error, &mut done_reducible);
            continue;
        }
        for c in children {
            live_reducible += c.reducible();
            heap.push(Ranked(c));
        }
        // keep the running sum from drifting negative through cancellation
        live_reducible = live_reducible.max(0.0);
    }

    out.value = done_value;
    out.error = done_error;
    let mut reducible = done_reducible;
    for Ranked(p) in heap {
        out.value += p.sum;
        out.error += p.diff;
        reducible += p.reducible();
    }
    out.converged = reducible <= limits.tol;
    out
}

/// Adaptive Gauss–Legendre quadrature of `f` over `[a, b]` by bisection.
pub(crate) fn adaptive_1d<F: FnMut(f64) -> Complex64>(
    rule: &GaussLegendre,
    f: &mut F,
    a: f64,
    b: f64,
    limits: &Limits,
) -> Adaptive {
    if a == b {
        return Adaptive::new();
    }
    let mut eval = |(lo, hi): (f64, f64)| rule.apply(f, lo, hi);
    let split = |(lo, hi): (f64, f64)| {
        let mid = 0.5 * (lo + hi);
        (mid != lo && mid != hi).then_some([(lo, mid), (mid, hi)])
    };
    refine::<_, 2>(&mut eval, &split, rule.order(), (a, b), limits)
}

type Rect = ((f64, f64), (f64, f64));

/// Quadtree version of [`adaptive_1d`] over a parameter rectangle.
pub(crate) fn adaptive_2d<F: FnMut(f64, f64) -> Complex64>(
    rule: &GaussLegendre,
    f: &mut F,
    xr: (f64, f64),
    yr: (f64, f64),
    limits: &Limits,
) -> Adaptive {
    let mut eval = |(x, y): Rect| rule.apply_2d(f, x, y);
    let split = |((a, b), (c, d)): Rect| {
        let mx = 0.5 * (a + b);
        let my = 0.5 * (c + d);
        (mx != a && mx != b && my != c && my != d).then_some([
            ((a, mx), (c, my)),
            ((mx, b), (c, my)),
            ((a, mx), (my, d)),
            ((mx, b), (my, d)),
        ])
    };
    refine::<_, 4>(&mut eval, &split, rule.order() * rule.order(), (xr, yr), limits)
}
