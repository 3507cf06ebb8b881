//! Plain-text game files.
//!
//! ```text
//! # a coin flip decides the stake, then a one-shot guess
//! game guess players 2
//! node 0 chance { 1/3 -> 1 2/3 -> 2 }
//! node 1 player 0 infostate "guess" { H -> 3 T -> 4 }
//! node 2 player 0 infostate "guess" { H -> 5 T -> 6 }
//! node 3 terminal [ 1 -1 ]
//! node 4 terminal [ -1 1 ]
//! node 5 terminal [ -2 2 ]
//! node 6 terminal [ 2 -2 ]
//! root 0
//! ```
//!
//! Players are numbered from 0. Node ids are arbitrary tokens. Chance probabilities may be
//! decimals or fractions `a/b` and each chance row must sum to 1 within 1e-12.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::game::{GameTree, Node, RawNode, TreeBuilder, CHANCE_SUM_TOL};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Quoted(String),
    Open,
    Close,
    OpenSq,
    CloseSq,
    Arrow,
    Newline,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let chars: Vec<char> = raw_line.chars().collect();
        let mut j = 0;
        while j < chars.len() {
            let c = chars[j];
            let column = j + 1;
            let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line, column });
            match c {
                '#' => break,
                c if c.is_whitespace() => j += 1,
                '{' => {
                    push(&mut out, Tok::Open);
                    j += 1;
                }
                '}' => {
                    push(&mut out, Tok::Close);
                    j += 1;
                }
                '[' => {
                    push(&mut out, Tok::OpenSq);
                    j += 1;
                }
                ']' => {
                    push(&mut out, Tok::CloseSq);
                    j += 1;
                }
                '-' if chars.get(j + 1) == Some(&'>') => {
                    push(&mut out, Tok::Arrow);
                    j += 2;
                }
                '"' => {
                    let mut s = String::new();
                    j += 1;
                    loop {
                        match chars.get(j) {
                            None => return Err(err(line, column, "unterminated string")),
                            Some('"') => break,
                            Some('\\') if j + 1 < chars.len() => {
                                s.push(chars[j + 1]);
                                j += 2;
                            }
                            Some(&ch) => {
                                s.push(ch);
                                j += 1;
                            }
                        }
                    }
                    j += 1;
                    push(&mut out, Tok::Quoted(s));
                }
                _ => {
                    let start = j;
                    while j < chars.len() {
                        let ch = chars[j];
                        if ch.is_whitespace()
                            || "{}[]\"#".contains(ch)
                            || (ch == '-' && chars.get(j + 1) == Some(&'>'))
                        {
                            break;
                        }
                        j += 1;
                    }
                    push(&mut out, Tok::Word(chars[start..j].iter().collect()));
                }
            }
        }
        out.push(Token {
            tok: Tok::Newline,
            line,
            column: chars.len() + 1,
        });
    }
    Ok(out)
}

struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn end_position(&self) -> (usize, usize) {
        self.toks.last().map_or((1, 1), |t| (t.line, t.column))
    }

    /// Next token, skipping newlines (brace blocks may span lines).
    fn next_skip_nl(&mut self) -> Result<Token> {
        loop {
            match self.next() {
                Some(Token {
                    tok: Tok::Newline, ..
                }) => continue,
                Some(t) => return Ok(t),
                None => {
                    let (l, c) = self.end_position();
                    return Err(err(l, c, "unexpected end of file"));
                }
            }
        }
    }

    fn word(&mut self, what: &str) -> Result<(String, usize, usize)> {
        match self.next() {
            Some(Token {
                tok: Tok::Word(w),
                line,
                column,
            }) => Ok((w, line, column)),
            Some(t) => Err(err(t.line, t.column, format!("expected {what}"))),
            None => {
                let (l, c) = self.end_position();
                Err(err(l, c, format!("expected {what}")))
            }
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        let (w, line, column) = self.word(kw)?;
        if w != kw {
            return Err(err(line, column, format!("expected {kw:?}, found {w:?}")));
        }
        Ok(())
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let t = self.next_skip_nl()?;
        if t.tok != want {
            return Err(err(t.line, t.column, format!("expected {what}")));
        }
        Ok(())
    }

    fn end_of_line(&mut self) -> Result<()> {
        match self.next() {
            None
            | Some(Token {
                tok: Tok::Newline, ..
            }) => Ok(()),
            Some(t) => Err(err(t.line, t.column, "unexpected trailing token")),
        }
    }
}

fn parse_number(s: &str, line: usize, column: usize) -> Result<f64> {
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a
                .parse()
                .map_err(|_| err(line, column, format!("bad number {s:?}")))?;
            let b: f64 = b
                .parse()
                .map_err(|_| err(line, column, format!("bad number {s:?}")))?;
            if b == 0.0 {
                return Err(err(line, column, "zero denominator"));
            }
            a / b
        }
        None => s
            .parse()
            .map_err(|_| err(line, column, format!("bad number {s:?}")))?,
    };
    if !value.is_finite() {
        return Err(err(line, column, format!("non-finite number {s:?}")));
    }
    Ok(value)
}

enum Pending {
    Chance(Vec<(f64, String, usize, usize)>),
    Decision {
        player: usize,
        key: String,
        actions: Vec<(String, String, usize, usize)>,
    },
    Terminal(Vec<f64>),
}

struct PendingNode {
    id: String,
    line: usize,
    column: usize,
    body: Pending,
}

/// Parses a game file into a validated tree.
pub fn parse_game_file(text: &str) -> Result<GameTree> {
    let mut cur = Cursor {
        toks: tokenize(text)?,
        pos: 0,
    };
    let mut header: Option<(String, usize)> = None;
    let mut root: Option<(String, usize, usize)> = None;
    let mut nodes: Vec<PendingNode> = Vec::new();

    while let Some(t) = cur.peek().cloned() {
        if t.tok == Tok::Newline {
            cur.next();
            continue;
        }
        let (kw, line, column) = cur.word("a statement")?;
        match kw.as_str() {
            "game" => {
                if header.is_some() {
                    return Err(err(line, column, "duplicate game header"));
                }
                let (name, _, _) = cur.word("game name")?;
                cur.keyword("players")?;
                let (n, l, c) = cur.word("player count")?;
                let n: usize = n
                    .parse()
                    .ok()
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| err(l, c, format!("bad player count {n:?}")))?;
                cur.end_of_line()?;
                header = Some((name, n));
            }
            "root" => {
                if root.is_some() {
                    return Err(err(line, column, "duplicate root statement"));
                }
                let (id, l, c) = cur.word("root id")?;
                cur.end_of_line()?;
                root = Some((id, l, c));
            }
            "node" => {
                let (id, _, _) = cur.word("node id")?;
                let (kind, kl, kc) = cur.word("node kind")?;
                let body = match kind.as_str() {
                    "chance" => {
                        cur.expect(Tok::Open, "'{'")?;
                        let mut outcomes = Vec::new();
                        loop {
                            let t = cur.next_skip_nl()?;
                            match t.tok {
                                Tok::Close => break,
                                Tok::Word(p) => {
                                    let prob = parse_number(&p, t.line, t.column)?;
                                    if prob < 0.0 {
                                        return Err(err(t.line, t.column, "negative probability"));
                                    }
                                    cur.expect(Tok::Arrow, "'->'")?;
                                    let c = cur.next_skip_nl()?;
                                    let Tok::Word(child) = c.tok else {
                                        return Err(err(c.line, c.column, "expected child id"));
                                    };
                                    outcomes.push((prob, child, c.line, c.column));
                                }
                                _ => return Err(err(t.line, t.column, "expected probability")),
                            }
                        }
                        if outcomes.is_empty() {
                            return Err(err(
                                line,
                                column,
                                format!("chance node {id:?} has no outcomes"),
                            ));
                        }
                        let sum: f64 = outcomes.iter().map(|o| o.0).sum();
                        if (sum - 1.0).abs() > CHANCE_SUM_TOL {
                            return Err(err(
                                line,
                                column,
                                format!("chance node {id:?} probabilities sum to {sum}, not 1"),
                            ));
                        }
                        Pending::Chance(outcomes)
                    }
                    "player" => {
                        let (p, pl, pc) = cur.word("player index")?;
                        let player: usize = p
                            .parse()
                            .map_err(|_| err(pl, pc, format!("bad player index {p:?}")))?;
                        cur.keyword("infostate")?;
                        let t = cur
                            .next()
                            .ok_or_else(|| err(pl, pc, "expected infostate key"))?;
                        let key = match t.tok {
                            Tok::Quoted(k) | Tok::Word(k) => k,
                            _ => return Err(err(t.line, t.column, "expected infostate key")),
                        };
                        cur.expect(Tok::Open, "'{'")?;
                        let mut actions = Vec::new();
                        loop {
                            let t = cur.next_skip_nl()?;
                            match t.tok {
                                Tok::Close => break,
                                Tok::Word(label) | Tok::Quoted(label) => {
                                    cur.expect(Tok::Arrow, "'->'")?;
                                    let c = cur.next_skip_nl()?;
                                    let Tok::Word(child) = c.tok else {
                                        return Err(err(c.line, c.column, "expected child id"));
                                    };
                                    actions.push((label, child, c.line, c.column));
                                }
                                _ => return Err(err(t.line, t.column, "expected action label")),
                            }
                        }
                        if actions.is_empty() {
                            return Err(err(
                                line,
                                column,
                                format!("decision node {id:?} has no actions"),
                            ));
                        }
                        Pending::Decision {
                            player,
                            key,
                            actions,
                        }
                    }
                    "terminal" => {
                        cur.expect(Tok::OpenSq, "'['")?;
                        let mut payoffs = Vec::new();
                        loop {
                            let t = cur.next_skip_nl()?;
                            match t.tok {
                                Tok::CloseSq => break,
                                Tok::Word(v) => payoffs.push(parse_number(&v, t.line, t.column)?),
                                _ => return Err(err(t.line, t.column, "expected payoff")),
                            }
                        }
                        Pending::Terminal(payoffs)
                    }
                    other => {
                        return Err(err(kl, kc, format!("unknown node kind {other:?}")));
                    }
                };
                cur.end_of_line()?;
                nodes.push(PendingNode {
                    id,
                    line,
                    column,
                    body,
                });
            }
            other => return Err(err(line, column, format!("unknown statement {other:?}"))),
        }
    }

    let (l, c) = cur.end_position();
    let (name, players) = header.ok_or_else(|| err(1, 1, "missing game header"))?;
    let (root_id, rl, rc) = root.ok_or_else(|| err(l, c, "missing root statement"))?;

    let mut index = HashMap::new();
    for (i, n) in nodes.iter().enumerate() {
        if index.insert(n.id.clone(), i).is_some() {
            return Err(err(
                n.line,
                n.column,
                format!("duplicate node id {:?}", n.id),
            ));
        }
    }
    let resolve = |id: &str, line: usize, column: usize| {
        index
            .get(id)
            .copied()
            .ok_or_else(|| err(line, column, format!("dangling child reference {id:?}")))
    };

    let mut action_counts: HashMap<(usize, &str), (usize, usize)> = HashMap::new();
    let mut raw = Vec::with_capacity(nodes.len());
    for n in &nodes {
        raw.push(match &n.body {
            Pending::Chance(outcomes) => RawNode::Chance(
                outcomes
                    .iter()
                    .map(|(p, id, l, c)| Ok((*p, resolve(id, *l, *c)?)))
                    .collect::<Result<_>>()?,
            ),
            Pending::Decision {
                player,
                key,
                actions,
            } => {
                if *player >= players {
                    return Err(err(
                        n.line,
                        n.column,
                        format!("player {player} out of range for {players} players"),
                    ));
                }
                let seen = action_counts
                    .entry((*player, key.as_str()))
                    .or_insert((actions.len(), n.line));
                if seen.0 != actions.len() {
                    return Err(err(
                        n.line,
                        n.column,
                        format!(
                            "infostate {key:?} has {} actions here but {} at line {}",
                            actions.len(),
                            seen.0,
                            seen.1
                        ),
                    ));
                }
                RawNode::Decision {
                    player: *player,
                    key: key.clone(),
                    actions: actions
                        .iter()
                        .map(|(label, id, l, c)| Ok((label.clone(), resolve(id, *l, *c)?)))
                        .collect::<Result<_>>()?,
                }
            }
            Pending::Terminal(payoffs) => {
                if payoffs.len() != players {
                    return Err(err(
                        n.line,
                        n.column,
                        format!(
                            "terminal {:?} has {} payoffs, game has {players} players",
                            n.id,
                            payoffs.len()
                        ),
                    ));
                }
                RawNode::Terminal(payoffs.clone())
            }
        });
    }
    let root = resolve(&root_id, rl, rc)?;
    TreeBuilder::from_raw(raw).build(name, players, root)
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Serializes a tree in the game-file format; node ids are the tree's own indices.
pub fn write_game_file(tree: &GameTree) -> String {
    let mut out = String::new();
    let name: String = tree
        .name()
        .chars()
        .map(|c| {
            if c.is_whitespace() || "{}[]\"#".contains(c) {
                '_'
            } else {
                c
            }
        })
        .collect();
    writeln!(out, "game {name} players {}", tree.num_players()).unwrap();
    for (id, node) in tree.nodes().iter().enumerate() {
        match node {
            Node::Chance { outcomes } => {
                write!(out, "node {id} chance {{").unwrap();
                for (p, c) in outcomes {
                    write!(out, " {p:?} -> {c}").unwrap();
                }
                writeln!(out, " }}").unwrap();
            }
            Node::Decision {
                player,
                infostate,
                children,
            } => {
                let info = tree.infostate(*player, *infostate);
                write!(
                    out,
                    "node {id} player {player} infostate {} {{",
                    quote(&info.key)
                )
                .unwrap();
                for (label, c) in info.actions.iter().zip(children) {
                    write!(out, " {} -> {c}", quote(label)).unwrap();
                }
                writeln!(out, " }}").unwrap();
            }
            Node::Terminal { payoffs } => {
                let vals: Vec<String> = payoffs.iter().map(|v| format!("{v:?}")).collect();
                writeln!(out, "node {id} terminal [ {} ]", vals.join(" ")).unwrap();
            }
        }
    }
    writeln!(out, "root {}", tree.root()).unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const PENNIES: &str = r#"
# matching pennies, player 1 does not see player 0's coin
game matching_pennies players 2
node 0 player 0 infostate "p0" { H -> a T -> b }
node a player 1 infostate "p1" { H -> hh T -> ht }
node b player 1 infostate "p1" {
    H -> th
    T -> tt
}
node hh terminal [ 1 -1 ]
node ht terminal [ -1 1 ]
node th terminal [ -1 1 ]
node tt terminal [ 1 -1 ]
root 0
"#;

    #[test]
    fn parses_pennies() {
        let tree = parse_game_file(PENNIES).unwrap();
        assert_eq!(tree.num_players(), 2);
        assert_eq!(tree.num_decision_nodes(), 3);
        assert_eq!(tree.decision_points().per_player, vec![1, 1]);
        assert_eq!(tree.constant_sum(), Some(0.0));
    }

    #[test]
    fn fractions() {
        let text = "game g players 1\nnode r chance { 1/3 -> x 2/3 -> y }\nnode x terminal [1]\nnode y terminal [0]\nroot r\n";
        let tree = parse_game_file(text).unwrap();
        match tree.node(0) {
            Node::Chance { outcomes } => assert!((outcomes[0].0 - 1.0 / 3.0).abs() < 1e-16),
            _ => panic!(),
        }
    }

    #[test]
    fn bad_chance_row_names_node() {
        let text = "game g players 1\nnode r chance { 0.5 -> x 0.4 -> y }\nnode x terminal [1]\nnode y terminal [0]\nroot r\n";
        match parse_game_file(text) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("\"r\""), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dangling_child() {
        let text = "game g players 1\nnode r player 0 infostate \"s\" { a -> x b -> nope }\nnode x terminal [1]\nroot r\n";
        match parse_game_file(text) {
            Err(Error::Parse {
                line,
                column,
                message,
            }) => {
                assert_eq!((line, column), (2, 45));
                assert!(message.contains("nope"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn action_count_mismatch() {
        let text = r#"game g players 2
node r player 0 infostate "s" { a -> x b -> y }
node x player 1 infostate "t" { a -> t1 b -> t2 }
node y player 1 infostate "t" { a -> t3 }
node t1 terminal [1 0]
node t2 terminal [1 0]
node t3 terminal [1 0]
root r
"#;
        match parse_game_file(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_have_positions() {
        assert!(matches!(
            parse_game_file("game g players 1\nnode r terminal [1\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_game_file("game g players x\n"),
            Err(Error::Parse {
                line: 1,
                column: 16,
                ..
            })
        ));
        assert!(matches!(
            parse_game_file("game g players 1\nnode r terminal [1]\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_game_file("game g players 1\nfoo\nroot r\n"),
            Err(Error::Parse {
                line: 2,
                column: 1,
                ..
            })
        ));
    }

    #[test]
    fn writer_round_trip() {
        let tree = parse_game_file(PENNIES).unwrap();
        let again = parse_game_file(&write_game_file(&tree)).unwrap();
        assert_eq!(again, tree);
    }
}
