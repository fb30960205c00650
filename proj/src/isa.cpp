#include "spinsim/isa.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "spinsim/errors.hpp"

namespace spinsim {

namespace {

constexpr std::string_view kMnemonics[] = {"read", "write", "preset_gang", "preset_row", "not",  "copy", "nor",
                                           "nand", "maj3",  "maj5",        "th4",        "gate", ".phase"};

Op op_for_gate(GateKind g) {
    switch (g) {
        case GateKind::inv: return Op::not_;
        case GateKind::copy: return Op::copy;
        case GateKind::nor: return Op::nor;
        case GateKind::nand: return Op::nand;
        case GateKind::maj3: return Op::maj3;
        case GateKind::maj5: return Op::maj5;
        case GateKind::th: return Op::th4;
        default: return Op::gate;
    }
}

GateKind gate_for_op(Op op) {
    switch (op) {
        case Op::not_: return GateKind::inv;
        case Op::copy: return GateKind::copy;
        case Op::nor: return GateKind::nor;
        case Op::nand: return GateKind::nand;
        case Op::maj3: return GateKind::maj3;
        case Op::maj5: return GateKind::maj5;
        case Op::th4: return GateKind::th;
        default: throw std::logic_error("not a named gate op");
    }
}

}  // namespace

std::string_view op_mnemonic(Op op) { return kMnemonics[static_cast<int>(op)]; }

bool is_logic(Op op) { return op >= Op::not_ && op <= Op::gate; }

bool Micro::touches(int col) const {
    if (op == Op::write) return col >= cols[0] && col < cols[0] + static_cast<int>(bits.size());
    if (op == Op::read) return col >= cols[0] && col < cols[0] + count;
    const auto c = columns();
    return std::find(c.begin(), c.end(), col) != c.end();
}

Micro Micro::logic(GateKind g, int out, std::span<const int> inputs, int out2) {
    Micro m;
    m.op = op_for_gate(g);
    m.gate = g;
    m.n_out = out2 >= 0 ? 2 : 1;
    if (inputs.size() + m.n_out > m.cols.size()) throw std::invalid_argument("too many operands");
    m.cols[0] = out;
    if (out2 >= 0) m.cols[1] = out2;
    std::copy(inputs.begin(), inputs.end(), m.cols.begin() + m.n_out);
    m.n_cols = static_cast<std::uint8_t>(m.n_out + inputs.size());
    return m;
}

Micro Micro::from_step(const GateStep& s) { return logic(s.gate, s.out, s.inputs(), s.out2); }

Micro Micro::gang(int col, bool value) {
    Micro m;
    m.op = Op::preset_gang;
    m.value = value;
    m.n_cols = 1;
    m.cols[0] = col;
    return m;
}

Micro Micro::row_preset(int col, bool value, int row) {
    Micro m = gang(col, value);
    m.op = Op::preset_row;
    m.row = row;
    return m;
}

Micro Micro::write(int row, int col, std::vector<std::uint8_t> bits) {
    Micro m;
    m.op = Op::write;
    m.row = row;
    m.n_cols = 1;
    m.cols[0] = col;
    m.bits = std::move(bits);
    return m;
}

Micro Micro::read(int row, int col, int n) {
    Micro m;
    m.op = Op::read;
    m.row = row;
    m.n_cols = 1;
    m.cols[0] = col;
    m.count = n;
    return m;
}

Micro Micro::set_phase(Phase p) {
    Micro m;
    m.op = Op::phase;
    m.phase_value = p;
    return m;
}

void validate_program(std::span<const Micro> program, int rows, int cols) {
    std::size_t idx = 0;
    auto fail = [&](const std::string& what) {
        throw ContractViolation("micro " + std::to_string(idx) + " (" + std::string(op_mnemonic(program[idx].op)) +
                                "): " + what);
    };
    for (; idx < program.size(); ++idx) {
        const Micro& m = program[idx];
        for (int c : m.columns())
            if (c < 0 || c >= cols) fail("column " + std::to_string(c) + " out of range");
        switch (m.op) {
            case Op::read:
            case Op::write: {
                if (m.row < 0 || m.row >= rows) fail("row out of range");
                const int n = m.op == Op::read ? m.count : static_cast<int>(m.bits.size());
                if (n < 1) fail("zero width");
                if (m.cols[0] + n > cols) fail("range past the last column");
                break;
            }
            case Op::preset_row:
                if (m.row >= rows || m.row < -1) fail("row out of range");
                break;
            case Op::preset_gang:
            case Op::phase:
                break;
            default:
                if (static_cast<int>(m.inputs().size()) != gate_arity(m.gate)) fail("wrong number of inputs");
                if (m.n_out < 1 || m.n_out > 2) fail("logic ops take one or two outputs");
        }
    }
}

// --- assembler ------------------------------------------------------------

namespace {

struct Token {
    std::string text;
    int column;  // 1-based
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string strip_comment(const std::string& line) {
    const auto p = line.find(';');
    return p == std::string::npos ? line : line.substr(0, p);
}

// Splits "op a, b, c" into the mnemonic and operand tokens.
std::vector<Token> tokenize(const std::string& line, int lineno) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    out.push_back({lower(line.substr(i, j - i)), static_cast<int>(i) + 1});
    i = j;
    bool expect_operand = true;
    while (i < line.size()) {
        const char c = line[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == ',') {
            if (expect_operand) throw AsmError("empty operand", lineno, static_cast<int>(i) + 1);
            expect_operand = true;
            ++i;
            continue;
        }
        if (!expect_operand) throw AsmError("missing comma", lineno, static_cast<int>(i) + 1);
        j = i;
        while (j < line.size() && line[j] != ',' && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        out.push_back({lower(line.substr(i, j - i)), static_cast<int>(i) + 1});
        expect_operand = false;
        i = j;
    }
    if (out.size() > 1 && expect_operand) throw AsmError("trailing comma", lineno, static_cast<int>(line.size()));
    return out;
}

int parse_number(const Token& t, char prefix, int lineno) {
    if (t.text.size() < 2 || t.text[0] != prefix)
        throw AsmError(std::string("expected '") + prefix + "N', got '" + t.text + "'", lineno, t.column);
    int v = 0;
    const auto* b = t.text.data() + 1;
    const auto* e = t.text.data() + t.text.size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || v < 0) throw AsmError("bad number in '" + t.text + "'", lineno, t.column);
    return v;
}

std::vector<std::uint8_t> parse_bits(const Token& t, int lineno) {
    if (t.text.size() < 2 || t.text[0] != '#') throw AsmError("expected '#bits', got '" + t.text + "'", lineno, t.column);
    std::vector<std::uint8_t> bits;
    for (std::size_t i = 1; i < t.text.size(); ++i) {
        if (t.text[i] != '0' && t.text[i] != '1')
            throw AsmError("bit strings hold only 0 and 1", lineno, t.column + static_cast<int>(i));
        bits.push_back(t.text[i] == '1');
    }
    return bits;
}

bool parse_value_bit(const Token& t, int lineno) {
    const auto b = parse_bits(t, lineno);
    if (b.size() != 1) throw AsmError("preset value is a single bit", lineno, t.column);
    return b[0] != 0;
}

Micro parse_line(const std::vector<Token>& tk, int lineno) {
    const std::string& mn = tk[0].text;
    const std::size_t nops = tk.size() - 1;
    auto need = [&](std::size_t n) {
        if (nops != n)
            throw AsmError(mn + " takes " + std::to_string(n) + " operands, got " + std::to_string(nops), lineno,
                           tk[0].column);
    };

    if (mn == ".phase") {
        need(1);
        if (tk[1].text == "match") return Micro::set_phase(Phase::match);
        if (tk[1].text == "score") return Micro::set_phase(Phase::score);
        throw AsmError("phase is 'match' or 'score'", lineno, tk[1].column);
    }
    if (mn == "read") {
        need(3);
        return Micro::read(parse_number(tk[1], 'r', lineno), parse_number(tk[2], 'c', lineno),
                           parse_number(tk[3], 'n', lineno));
    }
    if (mn == "write") {
        need(3);
        return Micro::write(parse_number(tk[1], 'r', lineno), parse_number(tk[2], 'c', lineno), parse_bits(tk[3], lineno));
    }
    if (mn == "preset_gang") {
        need(2);
        return Micro::gang(parse_number(tk[1], 'c', lineno), parse_value_bit(tk[2], lineno));
    }
    if (mn == "preset_row") {
        if (nops == 2) return Micro::row_preset(parse_number(tk[1], 'c', lineno), parse_value_bit(tk[2], lineno));
        need(3);
        return Micro::row_preset(parse_number(tk[2], 'c', lineno), parse_value_bit(tk[3], lineno),
                                 parse_number(tk[1], 'r', lineno));
    }

    GateKind g;
    if (mn.rfind("gate.", 0) == 0) {
        try {
            g = gate_kind(mn.substr(5));
        } catch (const std::out_of_range&) {
            throw AsmError("unknown gate '" + mn.substr(5) + "'", lineno, tk[0].column);
        }
        if (op_for_gate(g) != Op::gate) throw AsmError("use the '" + std::string(op_mnemonic(op_for_gate(g))) + "' mnemonic", lineno, tk[0].column);
    } else {
        const auto it = std::find(std::begin(kMnemonics), std::end(kMnemonics), mn);
        if (it == std::end(kMnemonics) || !is_logic(static_cast<Op>(it - std::begin(kMnemonics))) ||
            static_cast<Op>(it - std::begin(kMnemonics)) == Op::gate)
            throw AsmError("unknown mnemonic '" + mn + "'", lineno, tk[0].column);
        g = gate_for_op(static_cast<Op>(it - std::begin(kMnemonics)));
    }
    const int arity = gate_arity(g);
    if (nops != static_cast<std::size_t>(arity + 1) && nops != static_cast<std::size_t>(arity + 2))
        throw AsmError(mn + " takes " + std::to_string(arity) + " inputs after one or two outputs", lineno, tk[0].column);
    std::vector<int> cols;
    for (std::size_t i = 1; i < tk.size(); ++i) cols.push_back(parse_number(tk[i], 'c', lineno));
    const bool fused = nops == static_cast<std::size_t>(arity + 2);
    const int first_in = fused ? 2 : 1;
    return Micro::logic(g, cols[0], std::span<const int>(cols).subspan(first_in), fused ? cols[1] : -1);
}

}  // namespace

Program assemble(const std::string& text) {
    Program out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = strip_comment(line);
        if (std::all_of(body.begin(), body.end(), [](unsigned char c) { return std::isspace(c); })) continue;
        out.push_back(parse_line(tokenize(body, lineno), lineno));
    }
    return out;
}

std::string normalize_asm(const std::string& text) {
    std::string out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = strip_comment(line);
        if (std::all_of(body.begin(), body.end(), [](unsigned char c) { return std::isspace(c); })) continue;
        const auto tk = tokenize(body, lineno);
        out += tk[0].text;
        for (std::size_t i = 1; i < tk.size(); ++i) out += (i == 1 ? " " : ", ") + tk[i].text;
        out += '\n';
    }
    return out;
}

std::string disassemble(std::span<const Micro> program) {
    std::ostringstream os;
    for (const Micro& m : program) {
        switch (m.op) {
            case Op::phase:
                os << ".phase " << (m.phase_value == Phase::match ? "match" : "score");
                break;
            case Op::read:
                os << "read r" << m.row << ", c" << m.cols[0] << ", n" << m.count;
                break;
            case Op::write:
                os << "write r" << m.row << ", c" << m.cols[0] << ", #";
                for (auto b : m.bits) os << (b ? '1' : '0');
                break;
            case Op::preset_gang:
                os << "preset_gang c" << m.cols[0] << ", #" << (m.value ? 1 : 0);
                break;
            case Op::preset_row:
                os << "preset_row ";
                if (m.row >= 0) os << "r" << m.row << ", ";
                os << "c" << m.cols[0] << ", #" << (m.value ? 1 : 0);
                break;
            default: {
                if (m.op == Op::gate) os << "gate." << gate_name(m.gate);
                else os << op_mnemonic(m.op);
                const auto c = m.columns();
                for (std::size_t i = 0; i < c.size(); ++i) os << (i == 0 ? " c" : ", c") << c[i];
            }
        }
        os << '\n';
    }
    return os.str();
}

// --- macros -----------------------------------------------------------------

Macro Macro::write_pm(int row, int col, std::vector<std::uint8_t> bits) {
    Macro m;
    m.kind = MacroKind::write_pm;
    m.dst = {row, col, static_cast<int>(bits.size())};
    m.bits = std::move(bits);
    return m;
}

Macro Macro::read_pm(int row, int col, int width) {
    Macro m;
    m.kind = MacroKind::read_pm;
    m.dst = {row, col, width};
    return m;
}

Macro Macro::readdir_pm(IntPm v) {
    Macro m;
    m.kind = MacroKind::readdir_pm;
    m.dst = v;
    return m;
}

Macro Macro::preset(int col, int width, bool value, bool gang, int row) {
    Macro m;
    m.kind = MacroKind::preset;
    m.dst = {row, col, width};
    m.value = value;
    m.gang = gang;
    return m;
}

Macro Macro::preset_mask(int col, std::vector<std::uint8_t> mask, bool gang) {
    Macro m;
    m.kind = MacroKind::preset_mask;
    m.dst = {-1, col, static_cast<int>(mask.size())};
    m.bits = std::move(mask);
    m.gang = gang;
    return m;
}

namespace {
Macro binary(MacroKind k, int out, int a, int b, int width, bool gang) {
    Macro m;
    m.kind = k;
    m.dst = {-1, out, width};
    m.a_col = a;
    m.b_col = b;
    m.gang = gang;
    return m;
}
}  // namespace

Macro Macro::nand_pm(int out, int a, int b, int width, bool gang) { return binary(MacroKind::nand_pm, out, a, b, width, gang); }
Macro Macro::nor_pm(int out, int a, int b, int width, bool gang) { return binary(MacroKind::nor_pm, out, a, b, width, gang); }
Macro Macro::xor_pm(int out, int a, int b, int width, bool gang) { return binary(MacroKind::xor_pm, out, a, b, width, gang); }

Macro Macro::add_pm(int first, int last, int dst_col, int dst_width, bool gang) {
    Macro m;
    m.kind = MacroKind::add_pm;
    m.dst = {-1, dst_col, dst_width};
    m.a_col = first;
    m.b_col = last;
    m.gang = gang;
    return m;
}

Macro Macro::align_match_pm(int loc, int char_bits, bool gang) {
    Macro m;
    m.kind = MacroKind::align_match_pm;
    m.loc = loc;
    m.char_bits = char_bits;
    m.gang = gang;
    return m;
}

int align_scratch_cols(int pattern_chars, int char_bits) {
    return pattern_chars * (1 + char_match_scratch(char_bits)) + reduction_tree_scratch(pattern_chars);
}

AlignScratch align_scratch(const RegionLayout& l, int pattern_chars, int char_bits) {
    AlignScratch s;
    s.match_base = l.scratch.begin;
    s.temps_base = s.match_base + pattern_chars;
    s.temps_per_char = char_match_scratch(char_bits);
    s.tree_base = s.temps_base + pattern_chars * s.temps_per_char;
    s.tree_limit = l.scratch.end() - s.tree_base;
    if (s.tree_limit < reduction_tree_scratch(pattern_chars))
        throw GeometryError("scratch compartment holds " + std::to_string(l.scratch.width) + " columns, alignment needs " +
                            std::to_string(align_scratch_cols(pattern_chars, char_bits)));
    return s;
}

void emit_sequence(Program& out, const GateSequence& seq, bool gang) {
    auto preset = [&](int col, bool v) { out.push_back(gang ? Micro::gang(col, v) : Micro::row_preset(col, v)); };
    for (const auto& [col, v] : seq.constants) preset(col, v);
    for (const GateStep& s : seq.steps) {
        preset(s.out, s.preset());
        if (s.out2 >= 0) preset(s.out2, s.preset());
        out.push_back(Micro::from_step(s));
    }
}

Program expand_macro(const Macro& m, const RegionLayout& layout, int rows, int cols) {
    auto in_cols = [&](int c, int w) {
        if (w < 1) throw ContractViolation("macro operand of width 0");
        if (c < 0 || c + w > cols) throw ContractViolation("macro operand columns out of range");
    };
    auto in_rows = [&](int r) {
        if (r < -1 || r >= rows) throw ContractViolation("macro row out of range");
    };
    Program p;
    switch (m.kind) {
        case MacroKind::write_pm:
            in_cols(m.dst.col, m.dst.width);
            if (m.dst.row < 0) throw ContractViolation("write_pm needs a row");
            in_rows(m.dst.row);
            p.push_back(Micro::write(m.dst.row, m.dst.col, m.bits));
            break;
        case MacroKind::read_pm:
        case MacroKind::readdir_pm:
            in_cols(m.dst.col, m.dst.width);
            in_rows(m.dst.row);
            if (m.dst.row >= 0) {
                p.push_back(Micro::read(m.dst.row, m.dst.col, m.dst.width));
            } else {
                for (int r = 0; r < rows; ++r) p.push_back(Micro::read(r, m.dst.col, m.dst.width));
            }
            break;
        case MacroKind::preset:
        case MacroKind::preset_mask: {
            in_cols(m.dst.col, m.dst.width);
            in_rows(m.dst.row);
            auto value = [&](int i) { return m.kind == MacroKind::preset ? m.value : m.bits[i] != 0; };
            if (m.dst.row >= 0) {
                std::vector<std::uint8_t> bits(m.dst.width);
                for (int i = 0; i < m.dst.width; ++i) bits[i] = value(i);
                p.push_back(Micro::write(m.dst.row, m.dst.col, std::move(bits)));
                break;
            }
            for (int i = 0; i < m.dst.width; ++i)
                p.push_back(m.gang ? Micro::gang(m.dst.col + i, value(i)) : Micro::row_preset(m.dst.col + i, value(i)));
            break;
        }
        case MacroKind::nand_pm:
        case MacroKind::nor_pm: {
            in_cols(m.dst.col, m.dst.width);
            in_cols(m.a_col, m.dst.width);
            in_cols(m.b_col, m.dst.width);
            const GateKind g = m.kind == MacroKind::nand_pm ? GateKind::nand : GateKind::nor;
            GateSequence seq;
            for (int i = 0; i < m.dst.width; ++i)
                seq.steps.push_back(make_step(g, {m.a_col + i, m.b_col + i}, m.dst.col + i));
            emit_sequence(p, seq, m.gang);
            break;
        }
        case MacroKind::xor_pm: {
            in_cols(m.dst.col, m.dst.width);
            in_cols(m.a_col, m.dst.width);
            in_cols(m.b_col, m.dst.width);
            if (layout.scratch.width < 2) throw GeometryError("xor_pm needs two scratch columns");
            GateSequence seq;
            for (int i = 0; i < m.dst.width; ++i)
                seq.append(xor_sequence(m.a_col + i, m.b_col + i, layout.scratch.begin, layout.scratch.begin + 1,
                                        m.dst.col + i));
            emit_sequence(p, seq, m.gang);
            break;
        }
        case MacroKind::add_pm: {
            const int n = m.b_col - m.a_col;
            in_cols(m.a_col, n);
            in_cols(m.dst.col, m.dst.width);
            std::vector<int> match(n);
            for (int i = 0; i < n; ++i) match[i] = m.a_col + i;
            p.push_back(Micro::set_phase(Phase::score));
            emit_sequence(p,
                          reduction_tree(match, layout.scratch.begin, layout.scratch.width, {m.dst.col, m.dst.width}),
                          m.gang);
            break;
        }
        case MacroKind::align_match_pm: {
            const int w = m.char_bits;
            const int chars = layout.pattern.width / w;
            if (chars < 1) throw ContractViolation("align_match_pm: empty pattern compartment");
            if (m.loc < 0 || (m.loc + chars) * w > layout.fragment.width)
                throw ContractViolation("align_match_pm: offset runs past the fragment");
            const AlignScratch s = align_scratch(layout, chars, w);
            p.push_back(Micro::set_phase(Phase::match));
            std::vector<int> a(w), b(w);
            for (int i = 0; i < chars; ++i) {
                for (int j = 0; j < w; ++j) {
                    a[j] = layout.pattern.begin + i * w + j;
                    b[j] = layout.fragment.begin + (m.loc + i) * w + j;
                }
                emit_sequence(p, char_match_sequence(a, b, s.temps_base + i * s.temps_per_char, s.match_base + i), m.gang);
            }
            break;
        }
    }
    validate_program(p, rows, cols);
    return p;
}

}  // namespace spinsim
