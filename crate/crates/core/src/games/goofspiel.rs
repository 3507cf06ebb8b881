//! Imperfect-information Goofspiel with simultaneous bids encoded sequentially.
//!
//! Each player holds cards 1..=K. Round r reveals a point card (K−r for descending order,
//! r+1 for ascending); every player bids a card from hand, the unique highest bid wins the
//! point card and ties discard it. Players observe only who won each round, never the bids.
//! When one card is left in every hand the final round is played out automatically.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::game::{GameTree, TreeBuilder};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointOrder {
    Descending,
    Ascending,
}

impl FromStr for PointOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "descending" => Ok(Self::Descending),
            "ascending" => Ok(Self::Ascending),
            _ => Err(Error::Config(format!(
                "point_order must be descending or ascending, got {s:?}"
            ))),
        }
    }
}

impl fmt::Display for PointOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Descending => "descending",
            Self::Ascending => "ascending",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Returns {
    /// Winners split +1, losers split −1; all-tie is 0 for everyone.
    WinLoss,
    /// Points won minus the average points won.
    PointDifference,
}

impl FromStr for Returns {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "win_loss" => Ok(Self::WinLoss),
            "point_difference" => Ok(Self::PointDifference),
            _ => Err(Error::Config(format!(
                "returns must be win_loss or point_difference, got {s:?}"
            ))),
        }
    }
}

impl fmt::Display for Returns {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::WinLoss => "win_loss",
            Self::PointDifference => "point_difference",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GoofspielParams {
    pub players: usize,
    pub cards: usize,
    pub point_order: PointOrder,
    pub returns: Returns,
}

impl Default for GoofspielParams {
    fn default() -> Self {
        Self {
            players: 2,
            cards: 3,
            point_order: PointOrder::Descending,
            returns: Returns::WinLoss,
        }
    }
}

impl GoofspielParams {
    pub fn name(&self) -> String {
        format!(
            "goofspiel(players={},cards={},point_order={},returns={})",
            self.players, self.cards, self.point_order, self.returns
        )
    }
}

pub fn goofspiel(params: GoofspielParams) -> Result<GameTree> {
    if params.players < 2 {
        return Err(Error::Config("goofspiel needs at least 2 players".into()));
    }
    if !(1..=6).contains(&params.cards) {
        return Err(Error::Config(format!(
            "goofspiel cards must be in 1..=6, got {}",
            params.cards
        )));
    }
    let mut b = TreeBuilder::new();
    let mut state = State {
        params,
        bids: vec![Vec::new(); params.players],
        winners: Vec::new(),
        points: vec![0.0; params.players],
    };
    let root = state.build(&mut b, 0);
    b.build(params.name(), params.players, root)
}

struct State {
    params: GoofspielParams,
    /// Cards bid so far by each player, in round order (current round included once bid).
    bids: Vec<Vec<usize>>,
    /// Winner of each finished round, `None` for a tie.
    winners: Vec<Option<usize>>,
    points: Vec<f64>,
}

impl State {
    fn round(&self) -> usize {
        self.winners.len()
    }

    fn point_card(&self, round: usize) -> f64 {
        match self.params.point_order {
            PointOrder::Descending => (self.params.cards - round) as f64,
            PointOrder::Ascending => (round + 1) as f64,
        }
    }

    fn hand(&self, player: usize) -> Vec<usize> {
        (1..=self.params.cards)
            .filter(|c| !self.bids[player][..self.round()].contains(c))
            .collect()
    }

    fn key(&self, player: usize) -> String {
        let r = self.round();
        let bids: Vec<String> = self.bids[player][..r]
            .iter()
            .map(|c| c.to_string())
            .collect();
        let wins: Vec<String> = self
            .winners
            .iter()
            .map(|w| w.map_or("t".to_string(), |p| p.to_string()))
            .collect();
        format!("bids={}|wins={}", bids.join(","), wins.join(","))
    }

    /// Builds the subtree where `player` is next to bid in the current round.
    fn build(&mut self, b: &mut TreeBuilder, player: usize) -> usize {
        let n = self.params.players;
        if self.round() == self.params.cards {
            return b.terminal(self.returns());
        }
        if player == n {
            return self.resolve_round(b);
        }
        let hand = self.hand(player);
        if hand.len() == 1 {
            // last round: everyone's bid is forced
            for p in 0..n {
                let last = self.hand(p)[0];
                self.bids[p].push(last);
            }
            let node = self.resolve_round(b);
            for p in 0..n {
                self.bids[p].pop();
            }
            return node;
        }
        let key = self.key(player);
        let mut actions = Vec::with_capacity(hand.len());
        for card in hand {
            self.bids[player].push(card);
            let child = self.build(b, player + 1);
            self.bids[player].pop();
            actions.push((card.to_string(), child));
        }
        b.decision(player, key, actions)
    }

    fn resolve_round(&mut self, b: &mut TreeBuilder) -> usize {
        let r = self.round();
        let bids: Vec<usize> = self.bids.iter().map(|h| h[r]).collect();
        let top = *bids.iter().max().expect("at least two players");
        let top_count = bids.iter().filter(|&&c| c == top).count();
        let winner = (top_count == 1).then(|| bids.iter().position(|&c| c == top).unwrap());
        let value = self.point_card(r);
        if let Some(w) = winner {
            self.points[w] += value;
        }
        self.winners.push(winner);
        let node = self.build(b, 0);
        self.winners.pop();
        if let Some(w) = winner {
            self.points[w] -= value;
        }
        node
    }

    fn returns(&self) -> Vec<f64> {
        let n = self.params.players;
        match self.params.returns {
            Returns::PointDifference => {
                let mean = self.points.iter().sum::<f64>() / n as f64;
                self.points.iter().map(|p| p - mean).collect()
            }
            Returns::WinLoss => {
                let best = self
                    .points
                    .iter()
                    .cloned()
                    .fold(f64::NEG_INFINITY, f64::max);
                let winners = self.points.iter().filter(|&&p| p == best).count();
                if winners == n {
                    return vec![0.0; n];
                }
                let losers = n - winners;
                self.points
                    .iter()
                    .map(|&p| {
                        if p == best {
                            1.0 / winners as f64
                        } else {
                            -1.0 / losers as f64
                        }
                    })
                    .collect()
            }
        }
    }
}
