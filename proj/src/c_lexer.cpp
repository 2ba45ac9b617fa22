#include "c_lexer.hpp"

#include "libwrap/error.hpp"

#include <cctype>
#include <unordered_map>

namespace libwrap::detail {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

std::string normalize_marker_path(const std::string& raw, const std::filesystem::path& base_dir) {
    if (raw.empty() || raw.front() == '<') return raw;  // <built-in>, <command-line>
    std::filesystem::path p(raw);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    return p.lexically_normal().string();
}

class Lexer {
public:
    Lexer(std::string_view src, const std::filesystem::path& base_dir) : src_(src), base_dir_(base_dir) {
        file_index("<stdin>");
    }

    LexedSource run() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '\n') {
                ++line_;
                ++pos_;
                at_line_start_ = true;
                continue;
            }
            if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
                ++pos_;
                continue;
            }
            if (c == '#' && at_line_start_) {
                directive();
                continue;
            }
            at_line_start_ = false;
            if (c == '/' && peek(1) == '*') {
                block_comment();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            } else if (is_ident_start(c)) {
                identifier();
            } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                       (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
                number();
            } else if (c == '"') {
                quoted('"', Token::Kind::string, pos_);
            } else if (c == '\'') {
                quoted('\'', Token::Kind::character, pos_);
            } else if (c == '.' && peek(1) == '.' && peek(2) == '.') {
                push(Token::Kind::punct, "...");
                pos_ += 3;
            } else if (c == '-' && peek(1) == '>') {
                push(Token::Kind::punct, "->");
                pos_ += 2;
            } else {
                push(Token::Kind::punct, std::string(1, c));
                ++pos_;
            }
        }
        out_.tokens.push_back(Token{Token::Kind::end, "<end of input>", file_, line_});
        out_.tokens = strip_noise(std::move(out_.tokens));
        return std::move(out_);
    }

private:
    char peek(std::size_t ahead) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }

    int file_index(const std::string& name) {
        auto [it, inserted] = file_ids_.try_emplace(name, static_cast<int>(out_.files.size()));
        if (inserted) out_.files.push_back(name);
        return it->second;
    }

    void push(Token::Kind kind, std::string text) {
        out_.tokens.push_back(Token{kind, std::move(text), file_, line_});
    }

    void directive() {
        std::size_t end = src_.find('\n', pos_);
        if (end == std::string_view::npos) end = src_.size();
        std::string_view text = src_.substr(pos_ + 1, end - pos_ - 1);
        pos_ = end;  // the newline itself is consumed by the main loop

        std::size_t i = 0;
        auto skip_ws = [&] {
            while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
        };
        skip_ws();
        if (text.substr(i, 4) == "line") {
            i += 4;
            skip_ws();
        }
        if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) return;  // pragma etc.

        int number = 0;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            number = number * 10 + (text[i] - '0');
            ++i;
        }
        skip_ws();
        if (i < text.size() && text[i] == '"') {
            std::string name;
            ++i;
            while (i < text.size() && text[i] != '"') {
                if (text[i] == '\\' && i + 1 < text.size()) ++i;
                name += text[i++];
            }
            file_ = file_index(normalize_marker_path(name, base_dir_));
        }
        // The marker names the number of the following line.
        line_ = number - 1;
    }

    void block_comment() {
        std::size_t end = src_.find("*/", pos_ + 2);
        if (end == std::string_view::npos) {
            throw ParseError(out_.files[file_], line_, "/*", "unterminated comment");
        }
        for (std::size_t i = pos_; i < end; ++i) {
            if (src_[i] == '\n') ++line_;
        }
        pos_ = end + 2;
    }

    void identifier() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
        std::string_view word = src_.substr(start, pos_ - start);
        // Encoding prefixes of string and character literals.
        if ((word == "L" || word == "u" || word == "U" || word == "u8") && pos_ < src_.size() &&
            (src_[pos_] == '"' || src_[pos_] == '\'')) {
            char q = src_[pos_];
            quoted(q, q == '"' ? Token::Kind::string : Token::Kind::character, start);
            return;
        }
        push(Token::Kind::identifier, std::string(word));
    }

    void number() {
        std::size_t start = pos_;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if ((c == '+' || c == '-') && pos_ > start) {
                char prev = src_[pos_ - 1];
                if (prev == 'e' || prev == 'E' || prev == 'p' || prev == 'P') {
                    ++pos_;
                    continue;
                }
            }
            if (!is_ident_char(c) && c != '.') break;
            ++pos_;
        }
        push(Token::Kind::number, std::string(src_.substr(start, pos_ - start)));
    }

    void quoted(char quote, Token::Kind kind, std::size_t start) {
        ++pos_;  // opening quote
        while (pos_ < src_.size() && src_[pos_] != quote) {
            if (src_[pos_] == '\\') ++pos_;
            if (pos_ < src_.size() && src_[pos_] == '\n') {
                throw ParseError(out_.files[file_], line_, std::string(1, quote), "unterminated literal");
            }
            ++pos_;
        }
        if (pos_ >= src_.size()) {
            throw ParseError(out_.files[file_], line_, std::string(1, quote), "unterminated literal");
        }
        ++pos_;
        push(kind, std::string(src_.substr(start, pos_ - start)));
    }

    // Drops `__attribute__((...))`, `__declspec(...)`, `__extension__` and
    // nullability annotations.
    std::vector<Token> strip_noise(std::vector<Token> in) {
        std::vector<Token> out;
        out.reserve(in.size());
        for (std::size_t i = 0; i < in.size(); ++i) {
            const Token& t = in[i];
            if (t.kind == Token::Kind::identifier) {
                if (t.text == "__extension__" || t.text == "_Nullable" || t.text == "_Nonnull" ||
                    t.text == "_Null_unspecified" || t.text == "__nonnull" || t.text == "__nullable") {
                    continue;
                }
                if (t.text == "__attribute__" || t.text == "__attribute" || t.text == "__declspec") {
                    std::size_t j = i + 1;
                    if (j >= in.size() || !in[j].is("(")) {
                        throw ParseError(out_.files[t.file], t.line, t.text, "expected '(' after attribute keyword");
                    }
                    int depth = 0;
                    for (; j < in.size(); ++j) {
                        if (in[j].kind == Token::Kind::end) {
                            throw ParseError(out_.files[t.file], t.line, t.text, "unbalanced attribute");
                        }
                        if (in[j].is("(")) ++depth;
                        if (in[j].is(")") && --depth == 0) break;
                    }
                    i = j;
                    continue;
                }
            }
            out.push_back(t);
        }
        return out;
    }

    std::string_view src_;
    std::filesystem::path base_dir_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int file_ = 0;
    bool at_line_start_ = true;
    LexedSource out_;
    std::unordered_map<std::string, int> file_ids_;
};

}  // namespace

LexedSource lex_preprocessed(std::string_view source, const std::filesystem::path& base_dir) {
    return Lexer(source, base_dir).run();
}

}  // namespace libwrap::detail
