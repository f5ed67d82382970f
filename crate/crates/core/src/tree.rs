//! Decision stumps and small axis-aligned classification trees with a
//! choice of split interpolation, plus the multi-split experiments.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{standard_normal_cdf, standard_normal_quantile};
use crate::error::{Error, Result};
use crate::montecarlo::seed::replicate_rng;
use crate::montecarlo::{replicate_chunks, PairedMoments};

/// Where the threshold goes inside the gap `(L_X, R_X)` between the two
/// sides of a cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum InterpolationRule {
    /// Threshold at `L_X`; a point goes right iff `x > L_X`.
    SweepLeft,
    /// Threshold at `R_X`; a point goes right iff `x >= R_X`.
    SweepRight,
    /// Threshold at `(L_X + R_X) / 2`; a point goes right iff it is above it.
    Midpoint,
}

impl InterpolationRule {
    pub const ALL: [InterpolationRule; 3] =
        [InterpolationRule::SweepLeft, InterpolationRule::SweepRight, InterpolationRule::Midpoint];

    pub fn name(&self) -> &'static str {
        match self {
            InterpolationRule::SweepLeft => "SL",
            InterpolationRule::SweepRight => "SR",
            InterpolationRule::Midpoint => "SB",
        }
    }

    /// Whether the threshold itself belongs to the right side.
    fn right_inclusive(&self) -> bool {
        *self == InterpolationRule::SweepRight
    }
}

impl fmt::Display for InterpolationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InterpolationRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sl" | "sweep_left" | "left" => Ok(InterpolationRule::SweepLeft),
            "sr" | "sweep_right" | "right" => Ok(InterpolationRule::SweepRight),
            "sb" | "midpoint" | "mid" => Ok(InterpolationRule::Midpoint),
            _ => Err(Error::Usage(format!("unknown interpolation rule `{s}`; expected SL, SR or SB"))),
        }
    }
}

impl TryFrom<String> for InterpolationRule {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<InterpolationRule> for String {
    fn from(r: InterpolationRule) -> String {
        r.name().to_string()
    }
}

/// A single axis-aligned cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StumpModel {
    pub feature: usize,
    pub left_class: bool,
    pub right_class: bool,
    /// Largest training value on the left of the cut.
    pub l_x: f64,
    /// Smallest training value on the right of the cut.
    pub r_x: f64,
    pub rule: InterpolationRule,
}

impl StumpModel {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.l_x + self.r_x)
    }

    /// Midpoint taken in the scale `forward` and mapped back with `inverse`.
    pub fn transformed_midpoint(&self, forward: impl Fn(f64) -> f64, inverse: impl Fn(f64) -> f64) -> f64 {
        inverse(0.5 * (forward(self.l_x) + forward(self.r_x)))
    }

    /// The active threshold.
    pub fn threshold(&self) -> f64 {
        match self.rule {
            InterpolationRule::SweepLeft => self.l_x,
            InterpolationRule::SweepRight => self.r_x,
            InterpolationRule::Midpoint => self.midpoint(),
        }
    }

    pub fn goes_right(&self, x: f64) -> bool {
        let t = self.threshold();
        if self.rule.right_inclusive() {
            x >= t
        } else {
            x > t
        }
    }

    /// Prediction for a point given by its feature vector.
    pub fn predict(&self, point: &[f64]) -> bool {
        if self.goes_right(point[self.feature]) {
            self.right_class
        } else {
            self.left_class
        }
    }
}

/// Result of fitting a stump: a cut, or a constant when only one class is
/// present.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StumpFit {
    Split(StumpModel),
    Constant(bool),
}

impl StumpFit {
    pub fn predict(&self, x: f64) -> bool {
        match self {
            StumpFit::Split(s) => s.predict(&[x]),
            StumpFit::Constant(c) => *c,
        }
    }
}

/// Majority label; an even split goes to class 1.
fn majority(ones: usize, total: usize) -> bool {
    2 * ones >= total
}

#[derive(Debug, Clone, Copy)]
struct Cut {
    feature: usize,
    errors: usize,
    impurity: f64,
    l_x: f64,
    r_x: f64,
    left_ones: usize,
    left: usize,
}

impl Cut {
    fn better_than(&self, other: &Option<Cut>) -> bool {
        match other {
            None => true,
            Some(o) => {
                self.errors < o.errors
                    || (self.errors == o.errors && self.impurity < o.impurity - 1e-12 * o.impurity.abs().max(1.0))
            }
        }
    }
}

/// Best cut of one feature over the points in `order`, which must be sorted
/// by that feature. Children must hold at least `min_leaf` points. Ties go
/// to the leftmost gap.
fn best_cut_sorted(feature: usize, values: &[f64], y: &[bool], order: &[usize], min_leaf: usize) -> Option<Cut> {
    let total = order.len();
    let total_ones = order.iter().filter(|&&i| y[i]).count();
    let mut best: Option<Cut> = None;
    let mut left_ones = 0;
    for pos in 0..total.saturating_sub(1) {
        if y[order[pos]] {
            left_ones += 1;
        }
        let left = pos + 1;
        let (a, b) = (values[order[pos]], values[order[pos + 1]]);
        if a >= b || left < min_leaf || total - left < min_leaf {
            continue;
        }
        let right = total - left;
        let right_ones = total_ones - left_ones;
        let errors = left_ones.min(left - left_ones) + right_ones.min(right - right_ones);
        let impurity = (left_ones * (left - left_ones)) as f64 / left as f64
            + (right_ones * (right - right_ones)) as f64 / right as f64;
        let cut = Cut { feature, errors, impurity, l_x: a, r_x: b, left_ones, left };
        if cut.better_than(&best) {
            best = Some(cut);
        }
    }
    best
}

fn check_xy(features: &[&[f64]], y: &[bool]) -> Result<()> {
    if y.is_empty() {
        return Err(Error::EmptyInput("no training points".into()));
    }
    if features.is_empty() {
        return Err(Error::EmptyInput("no features".into()));
    }
    for (j, col) in features.iter().enumerate() {
        if col.len() != y.len() {
            return Err(Error::Usage(format!(
                "feature {j} has {} values but there are {} labels",
                col.len(),
                y.len()
            )));
        }
        if col.iter().any(|v| v.is_nan()) {
            return Err(Error::Domain(format!("feature {j} contains NaN")));
        }
    }
    Ok(())
}

/// Fits a one-feature stump minimizing training misclassification, with
/// the within-side Gini impurity and then the leftmost gap breaking ties.
pub fn fit_stump(x: &[f64], y: &[bool], rule: InterpolationRule) -> Result<StumpFit> {
    check_xy(&[x], y)?;
    let ones = y.iter().filter(|&&b| b).count();
    if ones == 0 || ones == y.len() {
        return Ok(StumpFit::Constant(ones > 0));
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&i, &j| x[i].total_cmp(&x[j]));
    match best_cut_sorted(0, x, y, &order, 1) {
        None => Ok(StumpFit::Constant(majority(ones, y.len()))),
        Some(c) => Ok(StumpFit::Split(stump_from_cut(&c, ones, y.len(), rule))),
    }
}

fn stump_from_cut(c: &Cut, ones: usize, total: usize, rule: InterpolationRule) -> StumpModel {
    StumpModel {
        feature: c.feature,
        left_class: majority(c.left_ones, c.left),
        right_class: majority(ones - c.left_ones, total - c.left),
        l_x: c.l_x,
        r_x: c.r_x,
        rule,
    }
}

/// Stopping rules for tree growth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// Depth of the deepest allowed leaf; the root has depth 0.
    pub max_depth: usize,
    /// Fewest training points allowed in a leaf.
    pub min_node_size: usize,
    pub rule: InterpolationRule,
}

impl TreeParams {
    pub fn new(max_depth: usize, rule: InterpolationRule) -> Self {
        TreeParams { max_depth, min_node_size: 1, rule }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf { class: bool, size: usize },
    Split { stump: StumpModel, left: usize, right: usize },
}

/// An axis-aligned binary tree. Node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeModel {
    pub nodes: Vec<Node>,
    pub dims: usize,
    pub params: TreeParams,
}

/// One axis-aligned cell of the partition induced by a tree. Along each
/// feature the cell is `(lo, hi]`, or `[lo, hi)` under the sweep-right rule.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafRegion {
    pub bounds: Vec<(f64, f64)>,
    pub class: bool,
}

impl TreeModel {
    pub fn predict(&self, point: &[f64]) -> bool {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { class, .. } => return *class,
                Node::Split { stump, left, right } => {
                    at = if stump.goes_right(point[stump.feature]) { *right } else { *left };
                }
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Cells of the partition, each with its predicted class.
    pub fn leaf_regions(&self) -> Vec<LeafRegion> {
        let mut out = Vec::with_capacity(self.leaf_count());
        let mut stack = vec![(0usize, vec![(f64::NEG_INFINITY, f64::INFINITY); self.dims])];
        while let Some((at, bounds)) = stack.pop() {
            match &self.nodes[at] {
                Node::Leaf { class, .. } => out.push(LeafRegion { bounds, class: *class }),
                Node::Split { stump, left, right } => {
                    let t = stump.threshold();
                    let mut lb = bounds.clone();
                    lb[stump.feature].1 = lb[stump.feature].1.min(t);
                    let mut rb = bounds;
                    rb[stump.feature].0 = rb[stump.feature].0.max(t);
                    stack.push((*right, rb));
                    stack.push((*left, lb));
                }
            }
        }
        out
    }
}

/// Grows a tree on column-major `features` by recursive stump fitting over
/// every feature, until nodes are pure, too small or at the depth limit.
/// Across features, ties go to the lower feature index.
pub fn fit_tree(features: &[&[f64]], y: &[bool], params: TreeParams) -> Result<TreeModel> {
    check_xy(features, y)?;
    if params.min_node_size == 0 {
        return Err(Error::ParameterDomain("min_node_size must be at least 1".into()));
    }
    let mut nodes = Vec::new();
    let mut order = vec![Vec::with_capacity(y.len()); features.len()];
    grow(features, y, params, (0..y.len()).collect(), 0, &mut nodes, &mut order);
    Ok(TreeModel { nodes, dims: features.len(), params })
}

fn grow(
    features: &[&[f64]],
    y: &[bool],
    params: TreeParams,
    members: Vec<usize>,
    depth: usize,
    nodes: &mut Vec<Node>,
    scratch: &mut [Vec<usize>],
) -> usize {
    let id = nodes.len();
    let ones = members.iter().filter(|&&i| y[i]).count();
    let total = members.len();
    nodes.push(Node::Leaf { class: majority(ones, total), size: total });
    if ones == 0 || ones == total || depth >= params.max_depth || total < 2 * params.min_node_size {
        return id;
    }
    let mut best: Option<Cut> = None;
    for (f, col) in features.iter().enumerate() {
        let order = &mut scratch[f];
        order.clear();
        order.extend_from_slice(&members);
        order.sort_by(|&i, &j| col[i].total_cmp(&col[j]));
        if let Some(c) = best_cut_sorted(f, col, y, order, params.min_node_size) {
            if c.better_than(&best) {
                best = Some(c);
            }
        }
    }
    let Some(cut) = best else { return id };
    let stump = stump_from_cut(&cut, ones, total, params.rule);
    let col = features[stump.feature];
    let (right_members, left_members): (Vec<usize>, Vec<usize>) =
        members.into_iter().partition(|&i| stump.goes_right(col[i]));
    let left = grow(features, y, params, left_members, depth + 1, nodes, scratch);
    let right = grow(features, y, params, right_members, depth + 1, nodes, scratch);
    nodes[id] = Node::Split { stump, left, right };
    id
}

/// One-feature tree.
pub fn fit_tree_1d(x: &[f64], y: &[bool], max_depth: usize, rule: InterpolationRule) -> Result<TreeModel> {
    fit_tree(&[x], y, TreeParams::new(max_depth, rule))
}

/// Label of `u` under the order-`k` splitting set: the dyadic intervals of
/// width `2^-(k+1)` alternate between class 1 and class 0, starting with 1.
pub fn splitting_set_label(order: u32, u: f64) -> bool {
    let cells = (u * 2f64.powi(order as i32 + 1)).floor() as u64;
    cells.is_multiple_of(2)
}

/// Measure of `{v in [0, u] : label(v) = 1}` for the order-`k` splitting set.
pub fn splitting_set_mass(order: u32, u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    let period = 0.5f64.powi(order as i32);
    let scaled = u / period;
    let whole = scaled.floor();
    period * (0.5 * whole + (scaled - whole).min(0.5))
}

/// Measure of the points in `[0, 1]` that a 1-D tree misclassifies under the
/// order-`k` splitting set. `to_unit` maps the tree's working scale onto
/// `[0, 1]` and must be increasing.
pub fn splitting_set_error(tree: &TreeModel, order: u32, to_unit: impl Fn(f64) -> f64) -> f64 {
    let unit = |x: f64| {
        if x == f64::NEG_INFINITY {
            0.0
        } else if x == f64::INFINITY {
            1.0
        } else {
            to_unit(x).clamp(0.0, 1.0)
        }
    };
    tree.leaf_regions()
        .iter()
        .map(|r| {
            let (a, b) = (unit(r.bounds[0].0), unit(r.bounds[0].1));
            let ones = splitting_set_mass(order, b) - splitting_set_mass(order, a);
            if r.class {
                (b - a) - ones
            } else {
                ones
            }
        })
        .sum()
}

/// Settings for the splitting-sets experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSetsConfig {
    pub orders: Vec<u32>,
    pub n: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub rule: InterpolationRule,
}

impl Default for SplitSetsConfig {
    fn default() -> Self {
        SplitSetsConfig { orders: vec![0, 1, 2, 3], n: vec![10, 20, 100], reps: 100_000, seed: 0, rule: InterpolationRule::Midpoint }
    }
}

impl SplitSetsConfig {
    pub fn validate(&self) -> Result<()> {
        validate_common(&self.n, self.reps)?;
        if self.orders.is_empty() {
            return Err(Error::config("orders", "must not be empty"));
        }
        for (i, &k) in self.orders.iter().enumerate() {
            if k > 30 {
                return Err(Error::config(format!("orders[{i}]"), format!("order {k} exceeds 30")));
            }
        }
        Ok(())
    }

    /// Depth limit for order `k`: enough for the `2^(k+1) - 1` cuts the set
    /// needs, with room for greedy detours.
    pub fn max_depth(order: u32) -> usize {
        2 * (order as usize + 1)
    }
}

fn validate_common(n: &[usize], reps: usize) -> Result<()> {
    if n.is_empty() {
        return Err(Error::config("n", "must not be empty"));
    }
    for (i, &v) in n.iter().enumerate() {
        if v == 0 {
            return Err(Error::config(format!("n[{i}]"), "sample size must be at least 1"));
        }
    }
    if reps == 0 {
        return Err(Error::config("reps", "must be at least 1"));
    }
    Ok(())
}

/// Misclassification in the raw (normal) scale against the quantile
/// (uniform) scale, on common samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleComparison {
    pub mae_raw: f64,
    pub se_raw: f64,
    pub mae_quantile: f64,
    pub se_quantile: f64,
    /// `mae_raw / mae_quantile`.
    pub ratio: f64,
    pub se_ratio: f64,
    pub reps: u64,
}

impl ScaleComparison {
    fn from_moments(m: &PairedMoments) -> Self {
        ScaleComparison {
            mae_raw: m.first().mean(),
            se_raw: m.first().stderr(),
            mae_quantile: m.second().mean(),
            se_quantile: m.second().stderr(),
            ratio: m.ratio(),
            se_ratio: m.se_ratio(),
            reps: m.count(),
        }
    }

    fn fields(&self) -> [String; 7] {
        [
            self.mae_raw.to_string(),
            self.se_raw.to_string(),
            self.mae_quantile.to_string(),
            self.se_quantile.to_string(),
            self.ratio.to_string(),
            self.se_ratio.to_string(),
            self.reps.to_string(),
        ]
    }
}

const COMPARISON_HEADER: [&str; 7] = ["mae_raw", "se_raw", "mae_quantile", "se_quantile", "ratio", "se_ratio", "reps"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSetsRow {
    pub order: u32,
    pub n: usize,
    #[serde(flatten)]
    pub result: ScaleComparison,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SplitSetsReport {
    pub rows: Vec<SplitSetsRow>,
}

impl SplitSetsReport {
    pub fn find(&self, order: u32, n: usize) -> Option<&ScaleComparison> {
        self.rows.iter().find(|r| r.order == order && r.n == n).map(|r| &r.result)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let rows = self.rows.iter().map(|r| {
            let mut v = vec![r.order.to_string(), r.n.to_string()];
            v.extend(r.result.fields());
            v
        });
        write_table(out, &["order", "n"], rows)
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        save_with(path, |f| self.write_csv(f))
    }
}

fn write_table<W: Write>(out: W, keys: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let header: Vec<&str> = keys.iter().copied().chain(COMPARISON_HEADER).collect();
    w.write_record(&header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

fn save_with(path: &Path, write: impl FnOnce(std::io::BufWriter<std::fs::File>) -> Result<()>) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write(std::io::BufWriter::new(file))
}

/// Splitting-sets experiment: `n` points with `U ~ U(0,1)` and
/// `X = Phi^-1(U)`, labeled by the order-`k` splitting set of `U`. A tree is
/// grown on `X` and on `U`; each is scored by the exact measure of `[0,1]`
/// it misclassifies.
pub fn simulate_splitting_sets(cfg: &SplitSetsConfig) -> Result<SplitSetsReport> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for (ki, &order) in cfg.orders.iter().enumerate() {
        let depth = SplitSetsConfig::max_depth(order);
        for (ni, &n) in cfg.n.iter().enumerate() {
            let cell = (ki * cfg.n.len() + ni) as u64;
            let (m, ..) = replicate_chunks(
                cfg.reps,
                || (PairedMoments::default(), vec![0.0; n], vec![0.0; n], vec![false; n]),
                |rep, (m, u, x, y)| {
                    let mut rng = replicate_rng(cfg.seed, cell, rep as u64);
                    for i in 0..n {
                        u[i] = rng.sample(Open01);
                        x[i] = standard_normal_quantile(u[i]);
                        y[i] = splitting_set_label(order, u[i]);
                    }
                    let raw = fit_tree_1d(x, y, depth, cfg.rule)?;
                    let quant = fit_tree_1d(u, y, depth, cfg.rule)?;
                    m.push(
                        splitting_set_error(&raw, order, standard_normal_cdf),
                        splitting_set_error(&quant, order, |v| v),
                    );
                    Ok(())
                },
                |total, (m, ..)| total.0.merge(&m),
            )?;
            rows.push(SplitSetsRow { order, n, result: ScaleComparison::from_moments(&m) });
        }
    }
    Ok(SplitSetsReport { rows })
}

/// Radius of the circle of area 1/2.
pub fn circle_radius() -> f64 {
    (0.5 / std::f64::consts::PI).sqrt()
}

/// Whether `(u1, u2)` lies inside the circle of area 1/2 centered in the
/// unit square.
pub fn inside_circle(u1: f64, u2: f64) -> bool {
    let (a, b) = (u1 - 0.5, u2 - 0.5);
    a * a + b * b < 0.5 / std::f64::consts::PI
}

/// Settings for the circle experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CircleConfig {
    pub n: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    /// Evaluation grid points per side.
    pub grid: usize,
    pub max_depth: usize,
}

impl Default for CircleConfig {
    fn default() -> Self {
        CircleConfig { n: vec![10, 20, 50, 100, 250, 500, 750, 1000], reps: 100_000, seed: 0, grid: 400, max_depth: 8 }
    }
}

impl CircleConfig {
    pub fn validate(&self) -> Result<()> {
        validate_common(&self.n, self.reps)?;
        if self.grid == 0 {
            return Err(Error::config("grid", "must be at least 1"));
        }
        if self.max_depth == 0 {
            return Err(Error::config("max_depth", "must be at least 1"));
        }
        Ok(())
    }
}

/// Evaluation grid of the unit square at cell centers, with the inside
/// count of every lower-left block precomputed so that the error of an
/// axis-aligned leaf costs O(log grid).
#[derive(Debug, Clone)]
pub struct CircleGrid {
    /// Cell centers `(i + 0.5) / side` in the unit scale.
    pub unit: Vec<f64>,
    /// The same centers in the standard normal scale.
    pub normal: Vec<f64>,
    /// `prefix[i * (side + 1) + j]`: inside points with row < i, column < j.
    prefix: Vec<u32>,
}

impl CircleGrid {
    pub fn new(side: usize) -> Self {
        let unit: Vec<f64> = (0..side).map(|i| (i as f64 + 0.5) / side as f64).collect();
        let normal = unit.iter().map(|&u| standard_normal_quantile(u)).collect();
        let w = side + 1;
        let mut prefix = vec![0u32; w * w];
        for i in 0..side {
            for j in 0..side {
                prefix[(i + 1) * w + j + 1] = prefix[i * w + j + 1] + prefix[(i + 1) * w + j] - prefix[i * w + j]
                    + inside_circle(unit[i], unit[j]) as u32;
            }
        }
        CircleGrid { unit, normal, prefix }
    }

    pub fn side(&self) -> usize {
        self.unit.len()
    }

    fn inside_block(&self, rows: (usize, usize), cols: (usize, usize)) -> u32 {
        let w = self.side() + 1;
        self.prefix[rows.1 * w + cols.1] + self.prefix[rows.0 * w + cols.0]
            - self.prefix[rows.0 * w + cols.1]
            - self.prefix[rows.1 * w + cols.0]
    }

    /// Fraction of grid points that `tree` misclassifies. `coords` holds the
    /// grid centers in the tree's working scale and must be increasing.
    pub fn error_rate(&self, tree: &TreeModel, coords: &[f64]) -> f64 {
        let inclusive = tree.params.rule.right_inclusive();
        let span = |(lo, hi): (f64, f64)| {
            // (lo, hi] normally; [lo, hi) when the threshold goes right
            let idx = |t: f64| {
                if inclusive {
                    coords.partition_point(|&c| c < t)
                } else {
                    coords.partition_point(|&c| c <= t)
                }
            };
            (idx(lo), idx(hi))
        };
        let mut wrong = 0u64;
        for leaf in tree.leaf_regions() {
            let rows = span(leaf.bounds[0]);
            let cols = span(leaf.bounds[1]);
            if rows.0 >= rows.1 || cols.0 >= cols.1 {
                continue;
            }
            let cells = ((rows.1 - rows.0) * (cols.1 - cols.0)) as u64;
            let inside = self.inside_block(rows, cols) as u64;
            wrong += if leaf.class { cells - inside } else { inside };
        }
        wrong as f64 / (self.side() * self.side()) as f64
    }

    /// Same as `error_rate`, by predicting every grid point.
    pub fn error_rate_brute_force(&self, tree: &TreeModel, coords: &[f64]) -> f64 {
        let mut wrong = 0usize;
        for (i, &a) in coords.iter().enumerate() {
            for (j, &b) in coords.iter().enumerate() {
                if tree.predict(&[a, b]) != inside_circle(self.unit[i], self.unit[j]) {
                    wrong += 1;
                }
            }
        }
        wrong as f64 / (self.side() * self.side()) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleRow {
    pub n: usize,
    #[serde(flatten)]
    pub result: ScaleComparison,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CircleReport {
    pub rows: Vec<CircleRow>,
}

impl CircleReport {
    pub fn find(&self, n: usize) -> Option<&ScaleComparison> {
        self.rows.iter().find(|r| r.n == n).map(|r| &r.result)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let rows = self.rows.iter().map(|r| {
            let mut v = vec![r.n.to_string()];
            v.extend(r.result.fields());
            v
        });
        write_table(out, &["n"], rows)
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        save_with(path, |f| self.write_csv(f))
    }
}

/// Circle experiment: points uniform on the unit square, labeled by the
/// circle of area 1/2, fitted by midpoint trees in the unit scale and in
/// the coordinate-wise standard normal scale, scored on the grid.
pub fn simulate_circle(cfg: &CircleConfig) -> Result<CircleReport> {
    cfg.validate()?;
    let grid = CircleGrid::new(cfg.grid);
    let params = TreeParams::new(cfg.max_depth, InterpolationRule::Midpoint);
    let mut rows = Vec::new();
    for (ni, &n) in cfg.n.iter().enumerate() {
        let (m, ..) = replicate_chunks(
            cfg.reps,
            || (PairedMoments::default(), [vec![0.0; n], vec![0.0; n]], [vec![0.0; n], vec![0.0; n]], vec![false; n]),
            |rep, (m, u, z, y)| {
                let mut rng = replicate_rng(cfg.seed, ni as u64, rep as u64);
                for i in 0..n {
                    u[0][i] = rng.sample(Open01);
                    u[1][i] = rng.sample(Open01);
                    z[0][i] = standard_normal_quantile(u[0][i]);
                    z[1][i] = standard_normal_quantile(u[1][i]);
                    y[i] = inside_circle(u[0][i], u[1][i]);
                }
                let raw = fit_tree(&[&z[0], &z[1]], y, params)?;
                let quant = fit_tree(&[&u[0], &u[1]], y, params)?;
                m.push(grid.error_rate(&raw, &grid.normal), grid.error_rate(&quant, &grid.unit));
                Ok(())
            },
            |total, (m, ..)| total.0.merge(&m),
        )?;
        rows.push(CircleRow { n, result: ScaleComparison::from_moments(&m) });
    }
    Ok(CircleReport { rows })
}
