//! Recursive-descent parser producing [`SyntaxTree`]s.
//!
//! Operator precedence, tightest first: unary `-` `!`, `^` (right
//! associative), `* / %`, `+ -`, comparisons, `&&`, `||`.

use super::error::ParseError;
use super::lexer::{tokenize, Token, TokenKind};
use super::tree::{NodeKind, SyntaxTree};

pub fn parse(source: &str) -> Result<SyntaxTree, ParseError> {
    let tokens = tokenize(source)?;
    let mut parser = Parser { tokens, pos: 0 };
    let program = parser.program()?;
    parser.expect(TokenKind::Eof, "end of input")?;
    Ok(program)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_kind(&self) -> &TokenKind {
        &self.peek().kind
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let tok = self.peek();
        ParseError {
            line: tok.line,
            column: tok.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: tok.kind.to_string(),
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<Token, ParseError> {
        if *self.peek_kind() == kind {
            Ok(self.advance())
        } else {
            Err(self.error(&[what]))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek_kind().clone() {
            TokenKind::Ident(name) => {
                self.advance();
                Ok(name)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn program(&mut self) -> Result<SyntaxTree, ParseError> {
        self.expect(TokenKind::Fn, "\"fn\"")?;
        let name = self.ident()?;
        self.expect(TokenKind::LParen, "\"(\"")?;
        let mut children = vec![SyntaxTree::leaf(NodeKind::Param, self.ident()?)];
        loop {
            match self.peek_kind() {
                TokenKind::Comma => {
                    self.advance();
                    children.push(SyntaxTree::leaf(NodeKind::Param, self.ident()?));
                }
                TokenKind::RParen => {
                    self.advance();
                    break;
                }
                _ => return Err(self.error(&["\",\"", "\")\""])),
            }
        }
        self.expect(TokenKind::LBrace, "\"{\"")?;
        if *self.peek_kind() == TokenKind::RBrace {
            return Err(self.error(&["statement"]));
        }
        children.extend(self.statements()?);
        self.expect(TokenKind::RBrace, "\"}\"")?;
        Ok(SyntaxTree::new(NodeKind::Program, Some(name), children))
    }

    /// Statements up to (not including) the closing brace.
    fn statements(&mut self) -> Result<Vec<SyntaxTree>, ParseError> {
        let mut stmts = Vec::new();
        while !matches!(self.peek_kind(), TokenKind::RBrace | TokenKind::Eof) {
            stmts.push(self.statement()?);
        }
        Ok(stmts)
    }

    fn block(&mut self) -> Result<SyntaxTree, ParseError> {
        self.expect(TokenKind::LBrace, "\"{\"")?;
        let stmts = self.statements()?;
        self.expect(TokenKind::RBrace, "\"}\"")?;
        Ok(SyntaxTree::new(NodeKind::Block, None, stmts))
    }

    fn statement(&mut self) -> Result<SyntaxTree, ParseError> {
        match self.peek_kind().clone() {
            TokenKind::Let => {
                self.advance();
                let name = self.ident()?;
                self.expect(TokenKind::Assign, "\"=\"")?;
                let value = self.expr()?;
                self.expect(TokenKind::Semicolon, "\";\"")?;
                Ok(SyntaxTree::new(NodeKind::Let, Some(name), vec![value]))
            }
            TokenKind::Return => {
                self.advance();
                let value = self.expr()?;
                self.expect(TokenKind::Semicolon, "\";\"")?;
                Ok(SyntaxTree::new(NodeKind::Return, None, vec![value]))
            }
            TokenKind::For => {
                self.advance();
                let var = self.ident()?;
                self.expect(TokenKind::In, "\"in\"")?;
                let start = self.expr()?;
                self.expect(TokenKind::DotDot, "\"..\"")?;
                let end = self.expr()?;
                let body = self.block()?;
                Ok(SyntaxTree::new(NodeKind::For, Some(var), vec![start, end, body]))
            }
            TokenKind::If => {
                self.advance();
                let cond = self.expr()?;
                let then = self.block()?;
                let mut children = vec![cond, then];
                if *self.peek_kind() == TokenKind::Else {
                    self.advance();
                    children.push(self.block()?);
                }
                Ok(SyntaxTree::new(NodeKind::If, None, children))
            }
            TokenKind::Ident(name) => {
                self.advance();
                match self.peek_kind() {
                    TokenKind::Assign => {
                        self.advance();
                        let value = self.expr()?;
                        self.expect(TokenKind::Semicolon, "\";\"")?;
                        Ok(SyntaxTree::new(NodeKind::Assign, Some(name), vec![value]))
                    }
                    TokenKind::LBracket => {
                        self.advance();
                        let mut children = self.expr_list(TokenKind::RBracket, "\"]\"")?;
                        self.expect(TokenKind::Assign, "\"=\"")?;
                        children.push(self.expr()?);
                        self.expect(TokenKind::Semicolon, "\";\"")?;
                        Ok(SyntaxTree::new(NodeKind::IndexAssign, Some(name), children))
                    }
                    _ => Err(self.error(&["\"=\"", "\"[\""])),
                }
            }
            _ => Err(self.error(&["\"let\"", "\"for\"", "\"if\"", "\"return\"", "identifier"])),
        }
    }

    /// One or more comma-separated expressions terminated by `close`.
    fn expr_list(&mut self, close: TokenKind, close_text: &str) -> Result<Vec<SyntaxTree>, ParseError> {
        let mut items = vec![self.expr()?];
        loop {
            if *self.peek_kind() == TokenKind::Comma {
                self.advance();
                items.push(self.expr()?);
            } else if *self.peek_kind() == close {
                self.advance();
                return Ok(items);
            } else {
                return Err(self.error(&["\",\"", close_text]));
            }
        }
    }

    fn expr(&mut self) -> Result<SyntaxTree, ParseError> {
        self.binary_level(0)
    }

    fn binary_level(&mut self, level: usize) -> Result<SyntaxTree, ParseError> {
        const LEVELS: [&[TokenKind]; 5] = [
            &[TokenKind::OrOr],
            &[TokenKind::AndAnd],
            &[
                TokenKind::Lt,
                TokenKind::Le,
                TokenKind::Gt,
                TokenKind::Ge,
                TokenKind::EqEq,
                TokenKind::NotEq,
            ],
            &[TokenKind::Plus, TokenKind::Minus],
            &[TokenKind::Star, TokenKind::Slash, TokenKind::Percent],
        ];
        if level == LEVELS.len() {
            return self.power();
        }
        let mut lhs = self.binary_level(level + 1)?;
        while LEVELS[level].contains(self.peek_kind()) {
            let op = self.advance().kind.operator().unwrap_or_default();
            let rhs = self.binary_level(level + 1)?;
            lhs = SyntaxTree::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn power(&mut self) -> Result<SyntaxTree, ParseError> {
        let base = self.unary()?;
        if *self.peek_kind() == TokenKind::Caret {
            self.advance();
            let exponent = self.power()?;
            return Ok(SyntaxTree::binary("^", base, exponent));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<SyntaxTree, ParseError> {
        match self.peek_kind() {
            TokenKind::Minus | TokenKind::Bang => {
                let op = self.advance().kind.operator().unwrap_or_default();
                Ok(SyntaxTree::unary(op, self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<SyntaxTree, ParseError> {
        match self.peek_kind().clone() {
            TokenKind::Number(text) => {
                self.advance();
                Ok(SyntaxTree::num(text))
            }
            TokenKind::LParen => {
                self.advance();
                let inner = self.expr()?;
                self.expect(TokenKind::RParen, "\")\"")?;
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                self.advance();
                match self.peek_kind() {
                    TokenKind::LParen => {
                        self.advance();
                        let args = if *self.peek_kind() == TokenKind::RParen {
                            self.advance();
                            Vec::new()
                        } else {
                            self.expr_list(TokenKind::RParen, "\")\"")?
                        };
                        Ok(SyntaxTree::new(NodeKind::Call, Some(name), args))
                    }
                    TokenKind::LBracket => {
                        self.advance();
                        let mut children = vec![SyntaxTree::ident(name)];
                        children.extend(self.expr_list(TokenKind::RBracket, "\"]\"")?);
                        Ok(SyntaxTree::new(NodeKind::Index, None, children))
                    }
                    _ => Ok(SyntaxTree::ident(name)),
                }
            }
            _ => Err(self.error(&["number", "identifier", "\"(\"", "\"-\"", "\"!\""])),
        }
    }
}
