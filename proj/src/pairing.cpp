#include "tablink/pairing.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>

namespace tablink {
namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }

constexpr int kMaxRange = 50;

void skip_gap(std::string_view t, std::size_t& i) {
    while (i < t.size()) {
        if (const std::size_t ws = whitespace_at(t, i)) {
            i += ws;
        } else if (t[i] == '~') {
            ++i;
        } else {
            break;
        }
    }
}

bool read_number(std::string_view t, std::size_t& i, int& value) {
    std::size_t j = i;
    while (j < t.size() && is_digit(t[j])) ++j;
    if (j == i || j - i > 4) return false;
    std::from_chars(t.data() + i, t.data() + j, value);
    i = j;
    return true;
}

enum class Joiner { None, List, Range };

// Consumes one list or range separator, returns which kind.
Joiner read_joiner(std::string_view t, std::size_t& i) {
    auto word = [&](std::string_view w) {
        if (starts_with_icase(t.substr(i), w) && (i + w.size() >= t.size() || !is_alpha(t[i + w.size()]))) {
            i += w.size();
            return true;
        }
        return false;
    };
    if (i < t.size() && t[i] == ',') {
        ++i;
        std::size_t k = i;
        skip_gap(t, k);
        std::size_t save = i;
        i = k;
        if (!word("and")) i = save;
        return Joiner::List;
    }
    if (word("and")) return Joiner::List;
    if (i < t.size() && t[i] == '&') {
        ++i;
        return Joiner::List;
    }
    if (t.substr(i, 3) == "\xE2\x80\x93" || t.substr(i, 3) == "\xE2\x80\x94") {
        i += 3;
        return Joiner::Range;
    }
    if (i < t.size() && t[i] == '-') {
        ++i;
        return Joiner::Range;
    }
    if (word("to")) return Joiner::Range;
    return Joiner::None;
}

std::size_t rtrimmed_size(std::string_view s) {
    std::size_t n = s.size();
    while (n > 0) {
        if (whitespace_at(s, n - 1)) {
            --n;
        } else if (n >= 2 && whitespace_at(s, n - 2) == 2) {
            n -= 2;
        } else {
            break;
        }
    }
    return n;
}

std::size_t leading_whitespace(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size() && whitespace_at(s, i)) i += whitespace_at(s, i);
    return i;
}

bool ends_with_terminator(std::string_view s) {
    if (s.empty()) return false;
    auto terminal = [](char c) { return c == '.' || c == '!' || c == '?'; };
    const char last = s.back();
    if (terminal(last)) return true;
    static constexpr std::string_view kClosers = ")]\"'";
    if (kClosers.find(last) != std::string_view::npos) return s.size() >= 2 && terminal(s[s.size() - 2]);
    // Curly closing quotes U+2019 / U+201D.
    if (s.size() >= 4 && static_cast<unsigned char>(s[s.size() - 3]) == 0xE2 &&
        static_cast<unsigned char>(s[s.size() - 2]) == 0x80) {
        const auto c = static_cast<unsigned char>(s.back());
        if (c == 0x99 || c == 0x9D) return terminal(s[s.size() - 4]);
    }
    return false;
}

}  // namespace

std::vector<TableReference> find_table_references(std::string_view text) {
    static constexpr struct {
        std::string_view word;
        bool plural;
    } kKeywords[] = {{"tables", true}, {"table", false}, {"tabs.", true}, {"tab.", false}};

    std::vector<TableReference> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (i > 0 && is_alnum(text[i - 1])) {
            ++i;
            continue;
        }
        bool matched = false;
        for (const auto& kw : kKeywords) {
            if (!starts_with_icase(text.substr(i), kw.word)) continue;
            std::size_t j = i + kw.word.size();
            if (kw.word.back() != '.' && j < text.size() && is_alpha(text[j])) continue;
            skip_gap(text, j);
            int first = 0;
            if (!read_number(text, j, first)) continue;

            std::vector<int> numbers{first};
            std::size_t end = j;
            if (kw.plural) {
                int prev = first;
                while (true) {
                    std::size_t k = end;
                    skip_gap(text, k);
                    const Joiner joiner = read_joiner(text, k);
                    if (joiner == Joiner::None) break;
                    skip_gap(text, k);
                    int next = 0;
                    if (!read_number(text, k, next)) break;
                    if (joiner == Joiner::Range && next > prev && next - prev <= kMaxRange) {
                        for (int n = prev + 1; n <= next; ++n) numbers.push_back(n);
                    } else {
                        numbers.push_back(next);
                    }
                    prev = next;
                    end = k;
                }
            }
            std::vector<int> unique;
            for (int n : numbers)
                if (std::find(unique.begin(), unique.end(), n) == unique.end()) unique.push_back(n);
            for (int n : unique) out.push_back(TableReference{n, Span{i, end}});
            i = end;
            matched = true;
            break;
        }
        if (!matched) ++i;
    }
    return out;
}

std::vector<Paragraph> merge_text_chunks(std::span<const Paragraph> blocks) {
    std::vector<Paragraph> out;
    for (const Paragraph& block : blocks) {
        if (out.empty()) {
            out.push_back(block);
            continue;
        }
        Paragraph& prev = out.back();
        const std::string_view head = std::string_view(prev.text).substr(0, rtrimmed_size(prev.text));
        const std::size_t lead = leading_whitespace(block.text);
        const std::string_view tail = std::string_view(block.text).substr(lead);
        if (head.empty() || tail.empty() || ends_with_terminator(head) ||
            !(is_lower(tail.front()) || is_digit(tail.front()))) {
            out.push_back(block);
            continue;
        }

        std::size_t keep = head.size();
        std::string_view joiner = " ";
        if (head.back() == '-' && head.size() >= 2 && is_alpha(head[head.size() - 2]) && is_lower(tail.front())) {
            keep -= 1;
            joiner = "";
        }
        std::string merged(head.substr(0, keep));
        merged.append(joiner);
        const std::size_t base = merged.size();
        merged.append(tail);

        for (TextFragment& f : prev.fragments) {
            f.span.start = std::min(f.span.start, keep);
            f.span.end = std::min(f.span.end, keep);
        }
        for (TextFragment f : block.fragments) {
            f.span.start = base + (f.span.start > lead ? f.span.start - lead : 0);
            f.span.end = base + (f.span.end > lead ? f.span.end - lead : 0);
            prev.fragments.push_back(f);
        }
        prev.text = std::move(merged);
    }
    return out;
}

std::vector<ParagraphTablePair> build_pairs(std::span<const Paragraph> paragraphs, std::span<const Table> tables,
                                            Warnings* warnings) {
    std::vector<ParagraphTablePair> out;
    for (const Paragraph& p : paragraphs) {
        std::vector<int> order;
        std::vector<std::vector<Span>> spans;
        for (const TableReference& ref : find_table_references(p.text)) {
            auto it = std::find(order.begin(), order.end(), ref.number);
            if (it == order.end()) {
                order.push_back(ref.number);
                spans.push_back({ref.span});
            } else {
                auto& list = spans[static_cast<std::size_t>(it - order.begin())];
                if (std::find(list.begin(), list.end(), ref.span) == list.end()) list.push_back(ref.span);
            }
        }
        for (std::size_t k = 0; k < order.size(); ++k) {
            auto table = std::find_if(tables.begin(), tables.end(), [&](const Table& t) { return t.number == order[k]; });
            if (table == tables.end()) {
                warn(warnings, "dangling-reference",
                     "paragraph " + p.id + " cites Table " + std::to_string(order[k]) + ", which is not in the document");
                continue;
            }
            out.push_back(ParagraphTablePair{p.id, table->id, table->number, std::move(spans[k])});
        }
    }
    return out;
}

std::vector<ParagraphTablePair> build_pairs(const ParsedDocument& doc, Warnings* warnings) {
    const auto merged = merge_text_chunks(doc.paragraphs);
    return build_pairs(merged, doc.tables, warnings);
}

}  // namespace tablink
