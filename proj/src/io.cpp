#include "mmlp/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "mmlp/errors.hpp"
#include "mmlp/rng.hpp"

namespace mmlp::io {

using logic::Atom;
using logic::PredSig;
using logic::Program;
using logic::Rule;
using logic::Task;
using logic::Term;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
    if (!out) throw Error("failed writing file: " + path);
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

enum class Tok { ident, variable, lparen, rparen, comma, period, implies, end };

struct Token {
    Tok kind = Tok::end;
    std::string text;
    int line = 1, col = 1;
};

class Lexer {
public:
    Lexer(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {
        advance();
    }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

    Token expect(Tok kind, const std::string& what) {
        if (tok_.kind != kind) fail("expected " + what);
        return take();
    }

    [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, tok_); }

    [[noreturn]] void fail_at(const std::string& msg, const Token& at) const {
        throw ParseError(source_ + ": " + msg, at.line, at.col);
    }

private:
    void advance() {
        skip_space();
        if (pos_ >= text_.size()) {
            tok_ = Token{Tok::end, "", line_, col_};
            return;
        }
        const char c = text_[pos_];
        if (c == '(') return single(Tok::lparen);
        if (c == ')') return single(Tok::rparen);
        if (c == ',') return single(Tok::comma);
        if (c == '.') return single(Tok::period);
        if (c == ':') {
            if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
                tok_ = Token{Tok::implies, ":-", line_, col_};
                bump();
                bump();
                return;
            }
            throw ParseError(source_ + ": stray ':'", line_, col_);
        }
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            Token t{Tok::ident, "", line_, col_};
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                t.text.push_back(text_[pos_]);
                bump();
            }
            if (std::isupper(static_cast<unsigned char>(t.text[0])) || t.text[0] == '_')
                t.kind = Tok::variable;
            tok_ = t;
            return;
        }
        throw ParseError(source_ + ": unexpected character '" + std::string(1, c) + "'", line_,
                         col_);
    }

    void single(Tok kind) {
        tok_ = Token{kind, std::string(1, text_[pos_]), line_, col_};
        bump();
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '%') {
                while (pos_ < text_.size() && text_[pos_] != '\n') bump();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                bump();
            } else {
                break;
            }
        }
    }

    void bump() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    const std::string& text_;
    std::string source_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

/// Variable name -> index map scoped to one clause.
struct VarScope {
    std::map<std::string, std::uint32_t> ids;

    std::uint32_t get(const std::string& name) {
        auto it = ids.find(name);
        if (it != ids.end()) return it->second;
        const auto id = static_cast<std::uint32_t>(ids.size());
        ids.emplace(name, id);
        return id;
    }
};

Atom parse_atom(Lexer& lex, VarScope& vars) {
    const Token name = lex.expect(Tok::ident, "a predicate name");
    Atom atom{name.text, {}};
    if (lex.peek().kind != Tok::lparen) return atom;
    lex.take();
    while (true) {
        const Token t = lex.take();
        if (t.kind == Tok::ident) {
            atom.args.push_back(Term::make_const(t.text));
        } else if (t.kind == Tok::variable) {
            atom.args.push_back(Term::make_var(vars.get(t.text)));
        } else {
            lex.fail_at("expected a constant or variable", t);
        }
        const Token next = lex.take();
        if (next.kind == Tok::rparen) break;
        if (next.kind != Tok::comma) lex.fail_at("expected ',' or ')'", next);
    }
    return atom;
}

struct Clause {
    Atom head;
    std::vector<Atom> body; // empty for facts
    Token at;
};

std::vector<Clause> parse_clauses(const std::string& text, const std::string& source) {
    Lexer lex(text, source);
    std::vector<Clause> out;
    while (lex.peek().kind != Tok::end) {
        Clause c;
        c.at = lex.peek();
        VarScope vars;
        c.head = parse_atom(lex, vars);
        if (lex.peek().kind == Tok::implies) {
            lex.take();
            while (true) {
                c.body.push_back(parse_atom(lex, vars));
                if (lex.peek().kind != Tok::comma) break;
                lex.take();
            }
        }
        lex.expect(Tok::period, "'.'");
        out.push_back(std::move(c));
    }
    return out;
}

struct LabeledExample {
    Atom atom;
    bool positive = false;
    Token at;
};

/// `pos(p(a,b)).` / `neg(p(a,b)).`, one wrapped ground atom per clause.
std::vector<LabeledExample> parse_wrapped_examples(const std::string& text,
                                                   const std::string& source) {
    Lexer lex(text, source);
    std::vector<LabeledExample> out;
    while (lex.peek().kind != Tok::end) {
        const Token wrapper = lex.expect(Tok::ident, "pos or neg");
        if (wrapper.text != "pos" && wrapper.text != "neg")
            lex.fail_at("expected pos(...) or neg(...), got " + wrapper.text, wrapper);
        lex.expect(Tok::lparen, "'('");
        VarScope vars;
        Atom atom = parse_atom(lex, vars);
        if (!atom.ground())
            lex.fail_at("examples must be ground", wrapper);
        lex.expect(Tok::rparen, "')'");
        lex.expect(Tok::period, "'.'");
        out.push_back(LabeledExample{std::move(atom), wrapper.text == "pos", wrapper});
    }
    return out;
}

std::uint64_t directive_value(const Clause& c, const std::string& source) {
    if (c.head.args.size() != 1 || c.head.args[0].is_var())
        throw ParseError(source + ": directive " + c.head.pred + " needs one numeric argument",
                         c.at.line, c.at.col);
    const std::string& s = c.head.args[0].name;
    for (char ch : s)
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            throw ParseError(source + ": directive " + c.head.pred + " needs a number, got " + s,
                             c.at.line, c.at.col);
    const std::uint64_t v = std::stoull(s);
    if (v == 0)
        throw ParseError(source + ": directive " + c.head.pred + " must be at least 1", c.at.line,
                         c.at.col);
    return v;
}

PredSig directive_signature(const Clause& c, const std::string& source) {
    if (c.head.args.size() != 2 || c.head.args[0].is_var() || c.head.args[1].is_var())
        throw ParseError(source + ": " + c.head.pred + " needs (name, arity)", c.at.line,
                         c.at.col);
    const std::string& arity_s = c.head.args[1].name;
    for (char ch : arity_s)
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            throw ParseError(source + ": bad arity " + arity_s, c.at.line, c.at.col);
    return PredSig{c.head.args[0].name, static_cast<unsigned>(std::stoul(arity_s))};
}

} // namespace

Task parse_task_text(const std::string& bk, const std::string& examples,
                     const std::string& bias) {
    Task task;
    const std::string bias_src = "bias";

    // Bias directives first: they declare the predicate vocabulary.
    bool have_target = false;
    std::optional<std::uint64_t> max_body, max_vars, max_rules, max_literals;
    auto set_once = [&](std::optional<std::uint64_t>& slot, const Clause& c) {
        if (slot)
            throw ParseError(bias_src + ": duplicate directive " + c.head.pred, c.at.line,
                             c.at.col);
        slot = directive_value(c, bias_src);
    };
    for (const Clause& c : parse_clauses(bias, bias_src)) {
        if (!c.body.empty())
            throw ParseError(bias_src + ": rules are not allowed here", c.at.line, c.at.col);
        const std::string& d = c.head.pred;
        if (d == "head_pred") {
            if (have_target)
                throw ParseError(bias_src + ": duplicate head_pred", c.at.line, c.at.col);
            have_target = true;
            task.target = directive_signature(c, bias_src);
        } else if (d == "body_pred") {
            const PredSig sig = directive_signature(c, bias_src);
            for (const auto& existing : task.bias.body_predicates)
                if (existing.name == sig.name)
                    throw ParseError(bias_src + ": duplicate body_pred " + sig.name, c.at.line,
                                     c.at.col);
            task.bias.body_predicates.push_back(sig);
        } else if (d == "max_body") {
            set_once(max_body, c);
        } else if (d == "max_vars") {
            set_once(max_vars, c);
        } else if (d == "max_rules") {
            set_once(max_rules, c);
        } else if (d == "max_literals") {
            set_once(max_literals, c);
        } else {
            throw ParseError(bias_src + ": unknown directive " + d, c.at.line, c.at.col);
        }
    }
    if (!have_target) throw ParseError(bias_src + ": missing head_pred directive", 1, 1);
    for (const auto& sig : task.bias.body_predicates)
        if (sig.name == task.target.name)
            throw ParseError(bias_src + ": " + sig.name + " is the head predicate and may not be "
                                                          "a body predicate",
                             1, 1);
    task.bias.max_body_literals_per_rule = static_cast<unsigned>(max_body.value_or(4));
    task.bias.max_vars_per_rule = static_cast<unsigned>(max_vars.value_or(6));
    task.bias.max_rules = static_cast<unsigned>(max_rules.value_or(5));
    task.bias.max_total_literals = static_cast<unsigned>(
        max_literals.value_or(static_cast<std::uint64_t>(task.bias.max_rules) *
                              task.bias.max_body_literals_per_rule));

    std::map<std::string, unsigned> declared;
    declared[task.target.name] = task.target.arity;
    for (const auto& sig : task.bias.body_predicates) declared[sig.name] = sig.arity;

    const std::string bk_src = "bk";
    auto check_atom = [&](const Atom& a, const Token& at, const std::string& src,
                          bool allow_target) {
        auto it = declared.find(a.pred);
        if (it == declared.end())
            throw ParseError(src + ": undeclared predicate " + a.pred, at.line, at.col);
        if (it->second != a.arity())
            throw ParseError(src + ": predicate " + a.pred + " declared with arity " +
                                 std::to_string(it->second) + ", used with arity " +
                                 std::to_string(a.arity()),
                             at.line, at.col);
        if (!allow_target && a.pred == task.target.name)
            throw ParseError(src + ": the head predicate " + a.pred +
                                 " may not appear in the background",
                             at.line, at.col);
    };

    for (const Clause& c : parse_clauses(bk, bk_src)) {
        check_atom(c.head, c.at, bk_src, false);
        for (const auto& b : c.body) check_atom(b, c.at, bk_src, false);
        if (c.body.empty()) {
            if (!c.head.ground())
                throw ParseError(bk_src + ": facts must be ground", c.at.line, c.at.col);
            task.background_facts.push_back(c.head);
        } else {
            Rule r{c.head, c.body};
            if (!logic::is_safe(r))
                throw ParseError(bk_src + ": every head variable must occur in the body",
                                 c.at.line, c.at.col);
            task.background_rules.push_back(std::move(r));
        }
    }

    const std::string exs_src = "examples";
    std::set<Atom> seen;
    for (LabeledExample& ex : parse_wrapped_examples(examples, exs_src)) {
        check_atom(ex.atom, ex.at, exs_src, true);
        if (ex.atom.pred != task.target.name)
            throw ParseError(exs_src + ": examples must use the head predicate " +
                                 task.target.name,
                             ex.at.line, ex.at.col);
        if (!seen.insert(ex.atom).second)
            throw ParseError(exs_src + ": duplicate example " + logic::to_string(ex.atom),
                             ex.at.line, ex.at.col);
        (ex.positive ? task.positives : task.negatives).push_back(std::move(ex.atom));
    }

    return task;
}

Task parse_task(const TaskFiles& files) {
    return parse_task_text(read_file(files.bk_path), read_file(files.examples_path),
                           read_file(files.bias_path));
}

void parse_examples_text(const std::string& text, const std::string& source_name,
                         const PredSig& target, std::vector<Atom>& positives,
                         std::vector<Atom>& negatives) {
    std::set<Atom> seen(positives.begin(), positives.end());
    seen.insert(negatives.begin(), negatives.end());
    for (LabeledExample& ex : parse_wrapped_examples(text, source_name)) {
        if (ex.atom.pred != target.name || ex.atom.arity() != target.arity)
            throw ParseError(source_name + ": examples must use " + target.name + "/" +
                                 std::to_string(target.arity),
                             ex.at.line, ex.at.col);
        if (!seen.insert(ex.atom).second)
            throw ParseError(source_name + ": duplicate example " + logic::to_string(ex.atom),
                             ex.at.line, ex.at.col);
        (ex.positive ? positives : negatives).push_back(std::move(ex.atom));
    }
}

std::pair<std::vector<Atom>, std::vector<Atom>> parse_examples_file(const std::string& path,
                                                                    const PredSig& target) {
    std::pair<std::vector<Atom>, std::vector<Atom>> out;
    parse_examples_text(read_file(path), path, target, out.first, out.second);
    return out;
}

Rule parse_rule_text(const std::string& text) {
    Lexer lex(text, "rule");
    VarScope vars;
    Rule rule;
    rule.head = parse_atom(lex, vars);
    if (lex.peek().kind == Tok::implies) {
        lex.take();
        while (true) {
            rule.body.push_back(parse_atom(lex, vars));
            if (lex.peek().kind != Tok::comma) break;
            lex.take();
        }
    }
    lex.expect(Tok::period, "'.'");
    if (lex.peek().kind != Tok::end) lex.fail("trailing text after rule");
    return rule;
}

std::string serialize_bk(const Task& task) {
    std::string out;
    for (const Atom& fact : task.background_facts) out += logic::to_string(fact) + ".\n";
    for (const Rule& rule : task.background_rules) out += logic::to_string(rule) + "\n";
    return out;
}

std::string serialize_examples(const std::vector<Atom>& positives,
                               const std::vector<Atom>& negatives) {
    std::string out;
    for (const Atom& a : positives) out += "pos(" + logic::to_string(a) + ").\n";
    for (const Atom& a : negatives) out += "neg(" + logic::to_string(a) + ").\n";
    return out;
}

std::string serialize_bias(const Task& task) {
    std::string out = "head_pred(" + task.target.name + "," + std::to_string(task.target.arity) +
                      ").\n";
    for (const PredSig& sig : task.bias.body_predicates)
        out += "body_pred(" + sig.name + "," + std::to_string(sig.arity) + ").\n";
    out += "max_body(" + std::to_string(task.bias.max_body_literals_per_rule) + ").\n";
    out += "max_vars(" + std::to_string(task.bias.max_vars_per_rule) + ").\n";
    out += "max_rules(" + std::to_string(task.bias.max_rules) + ").\n";
    out += "max_literals(" + std::to_string(task.bias.max_total_literals) + ").\n";
    return out;
}

std::string serialize_program(const Program& program) { return logic::to_string(program); }

logic::Task inject_noise(const Task& task, const PerturbSpec& spec) {
    if (spec.noise_fraction < 0.0 || spec.noise_fraction > 1.0)
        throw InvalidArgumentError("noise_fraction must lie in [0, 1]");
    const std::size_t n = task.positives.size() + task.negatives.size();
    const auto flips = static_cast<std::size_t>(
        std::floor(spec.noise_fraction * static_cast<double>(n) + 1e-9));

    std::vector<std::pair<Atom, bool>> combined;
    combined.reserve(n);
    for (const Atom& a : task.positives) combined.emplace_back(a, true);
    for (const Atom& a : task.negatives) combined.emplace_back(a, false);

    Rng rng(spec.seed);
    std::vector<bool> selected(n, false);
    for (std::size_t i : rng.sample_indices(n, flips)) selected[i] = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (!selected[i]) continue;
        if (spec.noise_mode == PerturbSpec::NoiseMode::reassign)
            combined[i].second = rng.coin();
        else
            combined[i].second = !combined[i].second;
    }

    Task out = task;
    out.positives.clear();
    out.negatives.clear();
    for (auto& [atom, positive] : combined)
        (positive ? out.positives : out.negatives).push_back(std::move(atom));
    return out;
}

logic::Task rebalance(const Task& task, const PerturbSpec& spec) {
    const std::size_t n = task.positives.size() + task.negatives.size();
    const std::size_t size = spec.sample_size ? static_cast<std::size_t>(*spec.sample_size) : n;
    Rng rng(spec.seed);
    Task out = task;
    out.positives.clear();
    out.negatives.clear();

    if (!spec.positive_proportion) {
        if (size > n)
            throw InvalidArgumentError("sample_size exceeds the number of examples");
        std::vector<std::size_t> idx = rng.sample_indices(n, size);
        std::sort(idx.begin(), idx.end());
        for (std::size_t i : idx) {
            if (i < task.positives.size())
                out.positives.push_back(task.positives[i]);
            else
                out.negatives.push_back(task.negatives[i - task.positives.size()]);
        }
        return out;
    }

    const double prop = *spec.positive_proportion;
    if (prop < 0.0 || prop > 1.0)
        throw InvalidArgumentError("positive_proportion must lie in [0, 1]");
    const auto n_pos = static_cast<std::size_t>(
        std::floor(prop * static_cast<double>(size) + 1e-9));
    const std::size_t n_neg = size - n_pos;
    if (n_pos > task.positives.size())
        throw InvalidArgumentError("not enough positive examples to rebalance");
    if (n_neg > task.negatives.size())
        throw InvalidArgumentError("not enough negative examples to rebalance");

    std::vector<std::size_t> pos_idx = rng.sample_indices(task.positives.size(), n_pos);
    std::vector<std::size_t> neg_idx = rng.sample_indices(task.negatives.size(), n_neg);
    std::sort(pos_idx.begin(), pos_idx.end());
    std::sort(neg_idx.begin(), neg_idx.end());
    for (std::size_t i : pos_idx) out.positives.push_back(task.positives[i]);
    for (std::size_t i : neg_idx) out.negatives.push_back(task.negatives[i]);
    return out;
}

namespace {

constexpr std::uint64_t kMaxGenAttempts = 2'000'000;

struct BucketCounts {
    unsigned train_pos, train_neg, test_pos, test_neg;

    bool done() const { return !train_pos && !train_neg && !test_pos && !test_neg; }
};

SyntheticTask gen_zendo(const SyntheticParams& params, std::uint64_t seed) {
    static const std::vector<std::string> kHidden = {"upright", "touching", "compact"};
    static const std::vector<std::string> kNoise = {"red",       "blue",   "grouped",
                                                    "scattered", "tilted", "paired"};
    if (params.hidden_body_literals < 1 || params.hidden_body_literals > kHidden.size())
        throw InvalidArgumentError("hidden_body_literals must lie in [1, " +
                                   std::to_string(kHidden.size()) + "]");
    if (params.noise_attrs > kNoise.size())
        throw InvalidArgumentError("noise_attrs must be at most " +
                                   std::to_string(kNoise.size()));

    SyntheticTask out;
    out.family = "zendo_like";
    out.seed = seed;
    Task& t = out.train;
    t.target = PredSig{"zendo", 1};
    std::vector<std::string> attrs(kHidden.begin(), kHidden.begin() + params.hidden_body_literals);
    attrs.insert(attrs.end(), kNoise.begin(), kNoise.begin() + params.noise_attrs);
    for (const std::string& a : attrs) t.bias.body_predicates.push_back(PredSig{a, 1});
    t.bias.max_body_literals_per_rule = 3;
    t.bias.max_vars_per_rule = 1;
    t.bias.max_rules = 5;
    t.bias.max_total_literals = 15;

    Rng rng(seed);
    BucketCounts need{params.train_pos, params.train_neg, params.test_pos, params.test_neg};
    unsigned kept = 0;
    std::uint64_t attempts = 0;
    std::vector<bool> has(attrs.size());
    while (!need.done()) {
        if (++attempts > kMaxGenAttempts)
            throw ResourceLimitError("scene generation exceeded its attempt budget");
        bool label = true;
        for (std::size_t i = 0; i < attrs.size(); ++i) {
            const double p =
                i < params.hidden_body_literals ? params.hidden_attr_p : params.noise_attr_p;
            has[i] = rng.unit() < p;
            if (i < params.hidden_body_literals && !has[i]) label = false;
        }
        unsigned* slot;
        bool is_test;
        if (label) {
            if (need.train_pos) { slot = &need.train_pos; is_test = false; }
            else if (need.test_pos) { slot = &need.test_pos; is_test = true; }
            else continue;
        } else {
            if (need.train_neg) { slot = &need.train_neg; is_test = false; }
            else if (need.test_neg) { slot = &need.test_neg; is_test = true; }
            else continue;
        }
        --*slot;
        const std::string name = "s" + std::to_string(kept++);
        for (std::size_t i = 0; i < attrs.size(); ++i)
            if (has[i]) t.background_facts.push_back(Atom{attrs[i], {Term::make_const(name)}});
        const Atom ex{"zendo", {Term::make_const(name)}};
        if (is_test)
            (label ? out.test_positives : out.test_negatives).push_back(ex);
        else
            (label ? t.positives : t.negatives).push_back(ex);
    }

    Rule hidden{Atom{"zendo", {Term::make_var(0)}}, {}};
    for (unsigned i = 0; i < params.hidden_body_literals; ++i)
        hidden.body.push_back(Atom{kHidden[i], {Term::make_var(0)}});
    out.hidden_rule = logic::canonical_rule(hidden);
    return out;
}

SyntheticTask gen_trains(const SyntheticParams& params, std::uint64_t seed) {
    if (params.max_cars < 1) throw InvalidArgumentError("max_cars must be at least 1");

    SyntheticTask out;
    out.family = "trains";
    out.seed = seed;
    Task& t = out.train;
    t.target = PredSig{"east", 1};
    t.bias.body_predicates = {PredSig{"has_car", 2}, PredSig{"short", 1}, PredSig{"closed", 1},
                              PredSig{"long", 1}, PredSig{"open_top", 1}};
    t.bias.max_body_literals_per_rule = 3;
    t.bias.max_vars_per_rule = 3;
    t.bias.max_rules = 5;
    t.bias.max_total_literals = 15;

    static const std::vector<std::string> kCarAttrs = {"short", "closed", "long", "open_top"};

    Rng rng(seed);
    BucketCounts need{params.train_pos, params.train_neg, params.test_pos, params.test_neg};
    unsigned kept = 0;
    std::uint64_t attempts = 0;
    while (!need.done()) {
        if (++attempts > kMaxGenAttempts)
            throw ResourceLimitError("train generation exceeded its attempt budget");
        const std::uint64_t n_cars = 1 + rng.below(params.max_cars);
        std::vector<std::array<bool, 4>> cars(n_cars);
        bool label = false;
        for (auto& car : cars) {
            car[0] = rng.unit() < params.short_p;
            for (std::size_t a = 1; a < kCarAttrs.size(); ++a) car[a] = rng.unit() < params.attr_p;
            if (car[0]) label = true;
        }
        unsigned* slot;
        bool is_test;
        if (label) {
            if (need.train_pos) { slot = &need.train_pos; is_test = false; }
            else if (need.test_pos) { slot = &need.test_pos; is_test = true; }
            else continue;
        } else {
            if (need.train_neg) { slot = &need.train_neg; is_test = false; }
            else if (need.test_neg) { slot = &need.test_neg; is_test = true; }
            else continue;
        }
        --*slot;
        const std::string train_name = "t" + std::to_string(kept++);
        for (std::size_t j = 0; j < cars.size(); ++j) {
            const std::string car_name = train_name + "c" + std::to_string(j);
            t.background_facts.push_back(
                Atom{"has_car", {Term::make_const(train_name), Term::make_const(car_name)}});
            for (std::size_t a = 0; a < kCarAttrs.size(); ++a)
                if (cars[j][a])
                    t.background_facts.push_back(Atom{kCarAttrs[a], {Term::make_const(car_name)}});
        }
        const Atom ex{"east", {Term::make_const(train_name)}};
        if (is_test)
            (label ? out.test_positives : out.test_negatives).push_back(ex);
        else
            (label ? t.positives : t.negatives).push_back(ex);
    }

    out.hidden_rule = logic::canonical_rule(
        Rule{Atom{"east", {Term::make_var(0)}},
             {Atom{"has_car", {Term::make_var(0), Term::make_var(1)}},
              Atom{"short", {Term::make_var(1)}}}});
    return out;
}

} // namespace

SyntheticTask gen_synthetic(SyntheticFamily family, const SyntheticParams& params,
                            std::uint64_t seed) {
    switch (family) {
    case SyntheticFamily::zendo_like: return gen_zendo(params, seed);
    case SyntheticFamily::trains: return gen_trains(params, seed);
    }
    throw InvalidArgumentError("unknown synthetic family");
}

TaskFiles write_task_files(const SyntheticTask& task, const std::string& directory) {
    std::filesystem::create_directories(directory);
    const auto path = [&](const char* name) {
        return (std::filesystem::path(directory) / name).string();
    };
    TaskFiles files{path("bk.pl"), path("exs.pl"), path("bias.pl")};
    write_file(files.bk_path, serialize_bk(task.train));
    write_file(files.examples_path,
               serialize_examples(task.train.positives, task.train.negatives));
    write_file(files.bias_path, serialize_bias(task.train));
    write_file(path("test_exs.pl"), serialize_examples(task.test_positives, task.test_negatives));

    nlohmann::json manifest;
    manifest["family"] = task.family;
    manifest["seed"] = task.seed;
    manifest["hidden_rule"] = logic::to_string(task.hidden_rule);
    manifest["train_positives"] = task.train.positives.size();
    manifest["train_negatives"] = task.train.negatives.size();
    manifest["test_positives"] = task.test_positives.size();
    manifest["test_negatives"] = task.test_negatives.size();
    write_file(path("manifest.json"), manifest.dump(2) + "\n");
    return files;
}

Report Report::from(const learners::LearnedHypothesis& hyp,
                    const learners::EvalMetrics& train_metrics,
                    const std::optional<learners::EvalMetrics>& test_metrics,
                    const cost::BetaPrior& prior, const std::string& prior_mode) {
    Report r;
    r.learner = hyp.provenance.learner;
    r.cost_kind = learners::to_string(hyp.cost_kind);
    r.prior_mode = prior_mode;
    r.seed = hyp.provenance.seed;
    r.alpha = prior.alpha;
    r.beta = prior.beta;
    r.counts = hyp.counts;
    r.thetas = hyp.thetas;
    r.breakdown = hyp.breakdown;
    r.cmdl = hyp.cmdl;
    r.e_plus = hyp.e_plus;
    r.e_minus = hyp.e_minus;
    r.train_balanced_accuracy = train_metrics.balanced_accuracy;
    if (test_metrics) r.test_balanced_accuracy = test_metrics->balanced_accuracy;
    for (const Rule& rule : hyp.program.rules) r.rules.push_back(logic::to_string(rule));
    return r;
}

std::string serialize_report(const Report& report) {
    std::string out = "report_version 1\n";
    const auto str = [&](const char* key, const std::string& v) { out += std::string(key) + " " + v + "\n"; };
    const auto num = [&](const char* key, double v) { str(key, fmt_double(v)); };
    const auto nat = [&](const char* key, std::uint64_t v) { str(key, std::to_string(v)); };
    str("learner", report.learner);
    str("cost_kind", report.cost_kind);
    str("prior_mode", report.prior_mode);
    nat("seed", report.seed);
    num("alpha", report.alpha);
    num("beta", report.beta);
    nat("tp", report.counts.tp);
    nat("fp", report.counts.fp);
    nat("tn", report.counts.tn);
    nat("fn", report.counts.fn);
    num("theta_plus", report.thetas.theta_plus);
    num("theta_minus", report.thetas.theta_minus);
    num("c_syntax", report.breakdown.c_syntax);
    num("c_theta", report.breakdown.c_theta);
    num("c_groupsize", report.breakdown.c_groupsize);
    num("c_lits", report.breakdown.c_lits);
    num("c_truth", report.breakdown.c_truth);
    num("total", report.breakdown.total);
    nat("cmdl", report.cmdl);
    nat("e_plus", report.e_plus);
    nat("e_minus", report.e_minus);
    num("train_balanced_accuracy", report.train_balanced_accuracy);
    if (report.test_balanced_accuracy) num("test_balanced_accuracy", *report.test_balanced_accuracy);
    nat("rules", report.rules.size());
    for (const std::string& rule : report.rules) str("rule", rule);
    return out;
}

Report parse_report(const std::string& text) {
    Report report;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool saw_version = false;
    std::optional<std::uint64_t> declared_rules;
    const auto parse_u64 = [&](const std::string& v) -> std::uint64_t {
        try {
            std::size_t used = 0;
            const std::uint64_t r = std::stoull(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return r;
        } catch (const std::exception&) {
            throw ParseError("report: bad integer " + v, line_no, 1);
        }
    };
    const auto parse_num = [&](const std::string& v) -> double {
        char* end = nullptr;
        const double r = std::strtod(v.c_str(), &end);
        if (end != v.c_str() + v.size() || v.empty())
            throw ParseError("report: bad number " + v, line_no, 1);
        return r;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::size_t sp = line.find(' ');
        const std::string key = line.substr(0, sp);
        const std::string value = sp == std::string::npos ? "" : line.substr(sp + 1);
        if (key == "report_version") {
            if (value != "1") throw ParseError("report: unsupported version " + value, line_no, 1);
            saw_version = true;
        } else if (key == "learner") { report.learner = value;
        } else if (key == "cost_kind") { report.cost_kind = value;
        } else if (key == "prior_mode") { report.prior_mode = value;
        } else if (key == "seed") { report.seed = parse_u64(value);
        } else if (key == "alpha") { report.alpha = parse_num(value);
        } else if (key == "beta") { report.beta = parse_num(value);
        } else if (key == "tp") { report.counts.tp = parse_u64(value);
        } else if (key == "fp") { report.counts.fp = parse_u64(value);
        } else if (key == "tn") { report.counts.tn = parse_u64(value);
        } else if (key == "fn") { report.counts.fn = parse_u64(value);
        } else if (key == "theta_plus") { report.thetas.theta_plus = parse_num(value);
        } else if (key == "theta_minus") { report.thetas.theta_minus = parse_num(value);
        } else if (key == "c_syntax") { report.breakdown.c_syntax = parse_num(value);
        } else if (key == "c_theta") { report.breakdown.c_theta = parse_num(value);
        } else if (key == "c_groupsize") { report.breakdown.c_groupsize = parse_num(value);
        } else if (key == "c_lits") { report.breakdown.c_lits = parse_num(value);
        } else if (key == "c_truth") { report.breakdown.c_truth = parse_num(value);
        } else if (key == "total") { report.breakdown.total = parse_num(value);
        } else if (key == "cmdl") { report.cmdl = parse_u64(value);
        } else if (key == "e_plus") { report.e_plus = parse_u64(value);
        } else if (key == "e_minus") { report.e_minus = parse_u64(value);
        } else if (key == "train_balanced_accuracy") {
            report.train_balanced_accuracy = parse_num(value);
        } else if (key == "test_balanced_accuracy") {
            report.test_balanced_accuracy = parse_num(value);
        } else if (key == "rules") { declared_rules = parse_u64(value);
        } else if (key == "rule") { report.rules.push_back(value);
        } else {
            throw ParseError("report: unknown key " + key, line_no, 1);
        }
    }
    if (!saw_version) throw ParseError("report: missing report_version", 1, 1);
    if (declared_rules && *declared_rules != report.rules.size())
        throw ParseError("report: rule count mismatch", line_no, 1);
    report.breakdown.thetas = report.thetas;
    return report;
}

} // namespace mmlp::io
