//! Two-player Leduc poker: six cards (two suits of J, Q, K), ante 1, two betting rounds with
//! raise sizes 2 and 4, at most two raises per round, one public card dealt between rounds.
//!
//! Cards are ids 0..6 with rank `id / 2`; keys keep the suit so that each dealt card is a
//! distinct observation.

use crate::error::{Error, Result};
use crate::game::{GameTree, TreeBuilder};

const DECK: usize = 6;
const RAISE: [f64; 2] = [2.0, 4.0];
const MAX_RAISES: usize = 2;

pub fn leduc_poker(players: usize) -> Result<GameTree> {
    if players != 2 {
        return Err(Error::Config(format!(
            "leduc_poker supports 2 players, got {players}"
        )));
    }
    let mut b = TreeBuilder::new();
    let mut outcomes = Vec::new();
    let deals = (DECK * (DECK - 1)) as f64;
    for c0 in 0..DECK {
        for c1 in 0..DECK {
            if c0 != c1 {
                let state = State::new([c0, c1]);
                outcomes.push((1.0 / deals, state.build(&mut b)));
            }
        }
    }
    let root = b.chance(outcomes);
    b.build("leduc_poker(players=2)", 2, root)
}

#[derive(Clone)]
struct State {
    private: [usize; 2],
    public: Option<usize>,
    round: usize,
    /// Action strings of round 1 and round 2.
    history: [String; 2],
    contrib: [f64; 2],
    raises: usize,
}

impl State {
    fn new(private: [usize; 2]) -> Self {
        Self {
            private,
            public: None,
            round: 0,
            history: [String::new(), String::new()],
            contrib: [1.0, 1.0],
            raises: 0,
        }
    }

    fn to_act(&self) -> usize {
        self.history[self.round].len() % 2
    }

    fn key(&self, player: usize) -> String {
        let public = self.public.map_or("-".to_string(), |c| c.to_string());
        format!(
            "{}:{}:{}/{}",
            self.private[player], public, self.history[0], self.history[1]
        )
    }

    fn build(&self, b: &mut TreeBuilder) -> usize {
        let p = self.to_act();
        let facing = self.contrib[1 - p] > self.contrib[p];
        let mut actions = Vec::new();
        if facing {
            let mut s = self.clone();
            s.history[s.round].push('f');
            actions.push(("f".to_string(), s.fold(p, b)));
        }
        {
            let mut s = self.clone();
            s.history[s.round].push('c');
            s.contrib[p] = s.contrib[1 - p];
            let round_over = facing || s.history[s.round].len() >= 2;
            let child = if round_over {
                s.end_round(b)
            } else {
                s.build(b)
            };
            actions.push(("c".to_string(), child));
        }
        if self.raises < MAX_RAISES {
            let mut s = self.clone();
            s.history[s.round].push('r');
            s.contrib[p] = s.contrib[1 - p] + RAISE[s.round];
            s.raises += 1;
            actions.push(("r".to_string(), s.build(b)));
        }
        b.decision(p, self.key(p), actions)
    }

    fn fold(&self, folder: usize, b: &mut TreeBuilder) -> usize {
        let mut payoffs = vec![0.0; 2];
        payoffs[folder] = -self.contrib[folder];
        payoffs[1 - folder] = self.contrib[folder];
        b.terminal(payoffs)
    }

    fn end_round(mut self, b: &mut TreeBuilder) -> usize {
        if self.round == 1 {
            return b.terminal(self.showdown());
        }
        self.round = 1;
        self.raises = 0;
        let remaining: Vec<usize> = (0..DECK).filter(|c| !self.private.contains(c)).collect();
        let prob = 1.0 / remaining.len() as f64;
        let outcomes = remaining
            .into_iter()
            .map(|c| {
                let mut s = self.clone();
                s.public = Some(c);
                (prob, s.build(b))
            })
            .collect();
        b.chance(outcomes)
    }

    fn showdown(&self) -> Vec<f64> {
        let public = self.public.expect("showdown after public card") / 2;
        let strength = |c: usize| {
            let rank = c / 2;
            if rank == public {
                10 + rank
            } else {
                rank
            }
        };
        let (s0, s1) = (strength(self.private[0]), strength(self.private[1]));
        let pot = self.contrib[0];
        match s0.cmp(&s1) {
            std::cmp::Ordering::Greater => vec![pot, -pot],
            std::cmp::Ordering::Less => vec![-pot, pot],
            std::cmp::Ordering::Equal => vec![0.0, 0.0],
        }
    }
}
