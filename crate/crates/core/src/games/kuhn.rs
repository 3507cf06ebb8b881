//! Kuhn poker for 2 or 3 players: N+1 cards, ante 1, one betting round with a single bet of 1.

use crate::error::{Error, Result};
use crate::game::{GameTree, TreeBuilder};

pub fn kuhn_poker(players: usize) -> Result<GameTree> {
    if !(2..=3).contains(&players) {
        return Err(Error::Config(format!(
            "kuhn_poker supports 2 or 3 players, got {players}"
        )));
    }
    let deck = players + 1;
    let mut deals = Vec::new();
    permutations(deck, players, &mut Vec::new(), &mut deals);
    let prob = 1.0 / deals.len() as f64;

    let mut b = TreeBuilder::new();
    let outcomes: Vec<(f64, usize)> = deals
        .iter()
        .map(|cards| (prob, build(&mut b, cards, &mut String::new())))
        .collect();
    let root = b.chance(outcomes);
    b.build(format!("kuhn_poker(players={players})"), players, root)
}

fn permutations(deck: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if prefix.len() == k {
        out.push(prefix.clone());
        return;
    }
    for c in 0..deck {
        if !prefix.contains(&c) {
            prefix.push(c);
            permutations(deck, k, prefix, out);
            prefix.pop();
        }
    }
}

/// The t-th action is always taken by player t mod N.
fn build(b: &mut TreeBuilder, cards: &[usize], history: &mut String) -> usize {
    let n = cards.len();
    let first_bet = history.find('b');
    let done = match first_bet {
        None => history.len() == n,
        Some(t) => history.len() == t + n,
    };
    if done {
        return b.terminal(payoffs(cards, history));
    }
    let player = history.len() % n;
    let key = format!("{}{}", cards[player], history);
    let mut actions = Vec::with_capacity(2);
    for a in ['p', 'b'] {
        history.push(a);
        let child = build(b, cards, history);
        history.pop();
        actions.push((a.to_string(), child));
    }
    b.decision(player, key, actions)
}

fn payoffs(cards: &[usize], history: &str) -> Vec<f64> {
    let n = cards.len();
    let mut contrib = vec![1.0; n];
    let mut in_hand = vec![true; n];
    if let Some(t) = history.find('b') {
        for (i, a) in history.chars().enumerate().skip(t) {
            let p = i % n;
            if a == 'b' {
                contrib[p] += 1.0;
            } else {
                in_hand[p] = false;
            }
        }
        // players who passed before the bet never put in more than the ante and must fold
        // unless they called later, which the loop above already recorded.
    }
    let pot: f64 = contrib.iter().sum();
    let winner = (0..n)
        .filter(|&p| in_hand[p])
        .max_by_key(|&p| cards[p])
        .expect("someone always stays in");
    (0..n)
        .map(|p| {
            if p == winner {
                pot - contrib[p]
            } else {
                -contrib[p]
            }
        })
        .collect()
}
