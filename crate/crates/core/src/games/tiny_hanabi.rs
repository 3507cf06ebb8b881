//! Two-step cooperative signaling games: each player privately draws one of `num_chance`
//! cards, player 0 acts seeing its card, player 1 acts seeing its card and player 0's action,
//! and both receive `payoff[c0][c1][a0][a1]`.

use crate::error::{Error, Result};
use crate::game::{GameTree, TreeBuilder};

#[derive(Clone, Debug, PartialEq)]
pub struct TinyHanabiPayoff {
    pub num_chance: usize,
    pub num_actions: usize,
    /// Row-major over (c0, c1, a0, a1).
    pub values: Vec<f64>,
}

impl TinyHanabiPayoff {
    pub fn new(num_chance: usize, num_actions: usize, values: Vec<f64>) -> Result<Self> {
        if num_chance == 0 || num_actions == 0 {
            return Err(Error::Config(
                "tiny_hanabi needs num_chance and num_actions >= 1".into(),
            ));
        }
        let expected = num_chance * num_chance * num_actions * num_actions;
        if values.len() != expected {
            return Err(Error::Config(format!(
                "tiny_hanabi payoff needs {expected} entries for num_chance={num_chance}, \
                 num_actions={num_actions}, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!(
                "tiny_hanabi payoff entry {v} is not finite"
            )));
        }
        Ok(Self {
            num_chance,
            num_actions,
            values,
        })
    }

    pub fn get(&self, c0: usize, c1: usize, a0: usize, a1: usize) -> f64 {
        let (c, a) = (self.num_chance, self.num_actions);
        self.values[((c0 * c + c1) * a + a0) * a + a1]
    }

    /// Default for game A: two cards, three actions. Action 1 is a safe play worth 8 for
    /// any deal; the other actions pay 10 only when player 1 can infer the deal.
    pub fn default_a() -> Self {
        #[rustfmt::skip]
        let values = vec![
            // c0=0, c1=0
            10.0, 0.0, 0.0,   4.0, 8.0, 4.0,   10.0, 0.0, 0.0,
            // c0=0, c1=1
            0.0, 0.0, 10.0,   4.0, 8.0, 4.0,   0.0, 0.0, 10.0,
            // c0=1, c1=0
            0.0, 0.0, 10.0,   4.0, 8.0, 4.0,   0.0, 0.0, 0.0,
            // c0=1, c1=1
            10.0, 0.0, 0.0,   4.0, 8.0, 4.0,   10.0, 0.0, 0.0,
        ];
        Self::new(2, 3, values).expect("valid default")
    }

    /// Default for game B: two cards, two actions. After action 0, player 1 earns 1 by naming
    /// player 0's card; after action 1 it earns 0.5 by naming its own card.
    pub fn default_b() -> Self {
        #[rustfmt::skip]
        let values = vec![
            // c0=0, c1=0
            1.0, 0.0,   0.5, 0.0,
            // c0=0, c1=1
            1.0, 0.0,   0.0, 0.5,
            // c0=1, c1=0
            0.0, 1.0,   0.5, 0.0,
            // c0=1, c1=1
            0.0, 1.0,   0.0, 0.5,
        ];
        Self::new(2, 2, values).expect("valid default")
    }

    /// Default for game C: two cards, two actions. Revealing player 0's card through its
    /// action is worth 3, pooling on one action is worth 2.5.
    pub fn default_c() -> Self {
        #[rustfmt::skip]
        let values = vec![
            // c0=0, c1=0
            3.0, 0.0,   2.0, 2.0,
            // c0=0, c1=1
            0.0, 3.0,   2.0, 2.0,
            // c0=1, c1=0
            2.0, 2.0,   3.0, 0.0,
            // c0=1, c1=1
            2.0, 2.0,   0.0, 3.0,
        ];
        Self::new(2, 2, values).expect("valid default")
    }
}

pub fn tiny_hanabi(name: impl Into<String>, payoff: &TinyHanabiPayoff) -> Result<GameTree> {
    let (c, a) = (payoff.num_chance, payoff.num_actions);
    let prob = 1.0 / (c * c) as f64;
    let mut b = TreeBuilder::new();
    let mut deals = Vec::with_capacity(c * c);
    for c0 in 0..c {
        for c1 in 0..c {
            let mut first = Vec::with_capacity(a);
            for a0 in 0..a {
                let second = (0..a)
                    .map(|a1| {
                        let v = payoff.get(c0, c1, a0, a1);
                        (format!("a{a1}"), b.terminal(vec![v, v]))
                    })
                    .collect();
                let node = b.decision(1, format!("c={c1}|a0={a0}"), second);
                first.push((format!("a{a0}"), node));
            }
            deals.push((prob, b.decision(0, format!("c={c0}"), first)));
        }
    }
    let root = b.chance(deals);
    b.build(name, 2, root)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let a = tiny_hanabi("a", &TinyHanabiPayoff::default_a()).unwrap();
        assert_eq!(a.decision_points().total, 8);
        assert_eq!(a.decision_points().per_player, vec![2, 6]);
        let b = tiny_hanabi("b", &TinyHanabiPayoff::default_b()).unwrap();
        assert_eq!(b.decision_points().total, 6);
        assert!(b.is_common_payoff());
    }

    #[test]
    fn payoff_indexing() {
        let p = TinyHanabiPayoff::default_a();
        assert_eq!(p.get(0, 1, 0, 2), 10.0);
        assert_eq!(p.get(1, 0, 2, 2), 0.0);
        assert_eq!(p.get(1, 1, 1, 1), 8.0);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(TinyHanabiPayoff::new(2, 2, vec![0.0; 15]).is_err());
        assert!(TinyHanabiPayoff::new(1, 1, vec![f64::NAN]).is_err());
        assert!(TinyHanabiPayoff::new(0, 2, vec![]).is_err());
    }
}
