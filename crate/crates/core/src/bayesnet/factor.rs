use super::BayesNet;

/// Work done by an elimination run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EliminationStats {
    /// Pairwise factor products formed.
    pub products: u64,
    /// Scalar multiplications inside those products.
    pub multiplications: u64,
}

/// Non-negative table over the joint assignments of a set of Boolean
/// variables.
///
/// `scope` is sorted ascending; bit `k` of a table index is the value of
/// `scope[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    scope: Vec<usize>,
    table: Vec<f64>,
}

impl Factor {
    pub fn new(scope: Vec<usize>, table: Vec<f64>) -> Self {
        debug_assert!(scope.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(table.len(), 1 << scope.len());
        debug_assert!(table.iter().all(|&v| v >= 0.0));
        Factor { scope, table }
    }

    pub fn constant(value: f64) -> Self {
        Factor::new(vec![], vec![value])
    }

    /// `P(var | parents)` as a factor over `{var} + parents`.
    pub fn from_cpt(net: &BayesNet, var: usize) -> Self {
        let parents = net.parents(var);
        let mut scope: Vec<usize> = parents.to_vec();
        scope.push(var);
        scope.sort_unstable();
        let position = |v: usize| scope.iter().position(|&s| s == v).unwrap();
        let var_bit = position(var);
        let parent_bits: Vec<usize> = parents.iter().map(|&p| position(p)).collect();
        let cpt = net.cpt(var);
        let table = (0..1usize << scope.len())
            .map(|idx| {
                let row = parent_bits
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| idx & (1 << b) != 0)
                    .fold(0usize, |acc, (k, _)| acc | (1 << k));
                if idx & (1 << var_bit) != 0 {
                    cpt[row]
                } else {
                    1.0 - cpt[row]
                }
            })
            .collect();
        Factor::new(scope, table)
    }

    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn contains(&self, var: usize) -> bool {
        self.scope.binary_search(&var).is_ok()
    }

    /// Value under an assignment given as `values[var]`.
    pub fn value_at(&self, values: &[bool]) -> f64 {
        let idx = self
            .scope
            .iter()
            .enumerate()
            .filter(|(_, &v)| values[v])
            .fold(0usize, |acc, (k, _)| acc | (1 << k));
        self.table[idx]
    }

    /// Fix `var` to `value` and drop it from the scope.
    pub fn reduce(&self, var: usize, value: bool) -> Factor {
        let Ok(bit) = self.scope.binary_search(&var) else {
            return self.clone();
        };
        let mut scope = self.scope.clone();
        scope.remove(bit);
        let table = (0..1usize << scope.len())
            .map(|idx| self.table[insert_bit(idx, bit, value)])
            .collect();
        Factor::new(scope, table)
    }

    pub fn product(&self, other: &Factor, stats: &mut EliminationStats) -> Factor {
        let mut scope: Vec<usize> = self.scope.iter().chain(&other.scope).copied().collect();
        scope.sort_unstable();
        scope.dedup();
        let map_a = bit_map(&self.scope, &scope);
        let map_b = bit_map(&other.scope, &scope);
        let table: Vec<f64> = (0..1usize << scope.len())
            .map(|idx| self.table[project(idx, &map_a)] * other.table[project(idx, &map_b)])
            .collect();
        stats.products += 1;
        stats.multiplications += table.len() as u64;
        Factor::new(scope, table)
    }

    pub fn sum_out(&self, var: usize) -> Factor {
        self.eliminate(var, |a, b| a + b)
    }

    pub fn max_out(&self, var: usize) -> Factor {
        self.eliminate(var, f64::max)
    }

    fn eliminate(&self, var: usize, combine: impl Fn(f64, f64) -> f64) -> Factor {
        let Ok(bit) = self.scope.binary_search(&var) else {
            return self.clone();
        };
        let mut scope = self.scope.clone();
        scope.remove(bit);
        let table = (0..1usize << scope.len())
            .map(|idx| {
                combine(
                    self.table[insert_bit(idx, bit, false)],
                    self.table[insert_bit(idx, bit, true)],
                )
            })
            .collect();
        Factor::new(scope, table)
    }

    pub fn total(&self) -> f64 {
        self.table.iter().sum()
    }
}

/// Insert `value` as bit `bit` of `idx`, shifting higher bits up.
fn insert_bit(idx: usize, bit: usize, value: bool) -> usize {
    let low = idx & ((1 << bit) - 1);
    let high = (idx >> bit) << (bit + 1);
    high | ((value as usize) << bit) | low
}

/// For each variable of `sub`, its bit position in `sup`.
fn bit_map(sub: &[usize], sup: &[usize]) -> Vec<usize> {
    sub.iter().map(|v| sup.binary_search(v).expect("sub-scope")).collect()
}

fn project(idx: usize, map: &[usize]) -> usize {
    map.iter()
        .enumerate()
        .filter(|(_, &b)| idx & (1 << b) != 0)
        .fold(0usize, |acc, (k, _)| acc | (1 << k))
}
