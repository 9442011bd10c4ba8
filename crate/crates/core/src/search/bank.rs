use rand::Rng;

/// Adaptive roulette-wheel weights for one family of operators.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorBank {
    names: Vec<&'static str>,
    weights: Vec<f64>,
    scores: Vec<f64>,
    uses: Vec<u32>,
    reaction: f64,
    floor: f64,
}

impl OperatorBank {
    pub fn new(names: &[&'static str], reaction: f64, floor: f64) -> Self {
        let n = names.len();
        Self {
            names: names.to_vec(),
            weights: vec![1.0; n],
            scores: vec![0.0; n],
            uses: vec![0; n],
            reaction,
            floor,
        }
    }

    pub fn name(&self, k: usize) -> &'static str {
        self.names[k]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let total: f64 = self.weights.iter().sum();
        self.weights.iter().map(|w| w / total).collect()
    }

    pub fn select<R: Rng>(&self, rng: &mut R) -> usize {
        let total: f64 = self.weights.iter().sum();
        let mut x = rng.gen::<f64>() * total;
        for (k, &w) in self.weights.iter().enumerate() {
            if x < w {
                return k;
            }
            x -= w;
        }
        self.weights.len() - 1
    }

    pub fn record(&mut self, k: usize, score: f64) {
        self.uses[k] += 1;
        self.scores[k] += score;
    }

    /// Closes a segment: blends in the mean score of each used operator.
    pub fn update(&mut self) {
        for k in 0..self.weights.len() {
            if self.uses[k] > 0 {
                let mean = self.scores[k] / self.uses[k] as f64;
                self.weights[k] = ((1.0 - self.reaction) * self.weights[k] + self.reaction * mean).max(self.floor);
            }
            self.scores[k] = 0.0;
            self.uses[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn update_blends_scores() {
        let mut b = OperatorBank::new(&["a", "b", "c"], 0.1, 1e-3);
        b.record(0, 33.0);
        b.record(0, 0.0);
        b.record(1, 0.0);
        b.update();
        assert!((b.weights()[0] - (0.9 + 0.1 * 16.5)).abs() < 1e-12);
        assert!((b.weights()[1] - 0.9).abs() < 1e-12);
        assert_eq!(b.weights()[2], 1.0);
        let p: f64 = b.probabilities().iter().sum();
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn floor_keeps_weights_positive() {
        let mut b = OperatorBank::new(&["a"], 1.0, 1e-3);
        b.record(0, 0.0);
        b.update();
        assert_eq!(b.weights()[0], 1e-3);
    }

    #[test]
    fn selection_follows_weights() {
        let mut b = OperatorBank::new(&["a", "b"], 1.0, 1e-3);
        b.record(0, 0.0);
        b.record(1, 9.0);
        b.update();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let hits = (0..10_000).filter(|_| b.select(&mut rng) == 1).count();
        assert!(hits > 9_900, "{hits}");
    }
}
