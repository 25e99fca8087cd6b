#include "egorank/events.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "egorank/digest.hpp"

namespace egorank {

namespace {

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool parse_int64(std::string_view tok, std::int64_t& out) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && !tok.empty();
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

InteractionEvent parse_csv_line(std::string_view line) {
    auto fields = split_csv(line);
    if (fields.size() != 4 && fields.size() != 5)
        throw MalformedRecord("expected 4 or 5 comma-separated fields, got " +
                              std::to_string(fields.size()));

    std::string a(trim(fields[0]));
    std::string b(trim(fields[1]));

    std::int64_t ts = 0;
    if (!parse_int64(trim(fields[2]), ts))
        throw MalformedRecord("unparseable timestamp '" + std::string(trim(fields[2])) + "'");

    InteractionType itype = type_from_token(trim(fields[3]));

    std::uint64_t size = 0;
    if (fields.size() == 5) {
        std::string_view tok = trim(fields[4]);
        std::int64_t sz = 0;
        if (!parse_int64(tok, sz) || sz < 0)
            throw MalformedRecord("unparseable size '" + std::string(tok) + "'");
        size = static_cast<std::uint64_t>(sz);
    }

    return make_event(std::move(a), std::move(b), ts, itype, size);
}

InteractionEvent parse_jsonl_line(std::string_view line) {
    nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw MalformedRecord("not a JSON object");

    auto require = [&](const char* key) -> const nlohmann::json& {
        auto it = doc.find(key);
        if (it == doc.end())
            throw MalformedRecord(std::string("missing key '") + key + "'");
        return *it;
    };

    const auto& a = require("a");
    const auto& b = require("b");
    const auto& ts = require("ts");
    const auto& type = require("type");
    if (!a.is_string() || !b.is_string())
        throw MalformedRecord("keys 'a' and 'b' must be strings");
    if (!ts.is_number_integer())
        throw MalformedRecord("key 'ts' must be an integer");
    if (!type.is_string())
        throw MalformedRecord("key 'type' must be a string");

    std::uint64_t size = 0;
    if (auto it = doc.find("size"); it != doc.end()) {
        if (!it->is_number_integer() || it->get<std::int64_t>() < 0)
            throw MalformedRecord("key 'size' must be a non-negative integer");
        size = it->get<std::uint64_t>();
    }

    return make_event(a.get<std::string>(), b.get<std::string>(),
                      ts.get<std::int64_t>(), type_from_token(type.get<std::string>()), size);
}

/// A CSV line is a header when its third column is not an integer.
bool looks_like_csv_header(std::string_view line) {
    auto fields = split_csv(line);
    if (fields.size() < 3) return false;
    std::int64_t ts = 0;
    return !parse_int64(trim(fields[2]), ts);
}

} // namespace

std::string_view type_token(InteractionType t) noexcept {
    switch (t) {
        case InteractionType::face_to_face: return "face_to_face";
        case InteractionType::video: return "video";
        case InteractionType::call: return "call";
        case InteractionType::message: return "message";
    }
    return "call";
}

InteractionType type_from_token(std::string_view token) {
    const std::string t = lowercase(trim(token));
    if (t == "face_to_face" || t == "f2f") return InteractionType::face_to_face;
    if (t == "video") return InteractionType::video;
    if (t == "call" || t == "phone") return InteractionType::call;
    if (t == "message" || t == "email" || t == "text") return InteractionType::message;
    throw UnknownInteractionType("unknown interaction type '" + std::string(token) + "'");
}

InteractionEvent make_event(std::string user_a, std::string user_b,
                            std::int64_t timestamp, InteractionType itype,
                            std::uint64_t size) {
    if (user_a.empty() || user_b.empty())
        throw MalformedRecord("empty user id");
    if (user_a == user_b)
        throw SelfInteraction("self-interaction for user '" + user_a + "'");
    if (timestamp < 0)
        throw NegativeTimestamp("negative timestamp " + std::to_string(timestamp));
    if (user_b < user_a)
        std::swap(user_a, user_b);
    if (itype != InteractionType::message)
        size = 0;
    return InteractionEvent{std::move(user_a), std::move(user_b), timestamp, itype, size};
}

InteractionEvent parse_event_line(std::string_view line, EventFormat format) {
    return format == EventFormat::csv ? parse_csv_line(line) : parse_jsonl_line(line);
}

std::string serialize_event_csv(const InteractionEvent& e) {
    std::string out;
    out += e.user_a;
    out += ',';
    out += e.user_b;
    out += ',';
    out += std::to_string(e.timestamp);
    out += ',';
    out += type_token(e.itype);
    out += ',';
    out += std::to_string(e.size);
    return out;
}

std::string serialize_event_jsonl(const InteractionEvent& e) {
    nlohmann::json doc;
    doc["a"] = e.user_a;
    doc["b"] = e.user_b;
    doc["ts"] = e.timestamp;
    doc["type"] = std::string(type_token(e.itype));
    doc["size"] = e.size;
    return doc.dump();
}

EventStream make_stream(std::vector<InteractionEvent> events, std::string digest) {
    std::stable_sort(events.begin(), events.end(),
                     [](const InteractionEvent& x, const InteractionEvent& y) {
                         return x.timestamp < y.timestamp;
                     });
    return EventStream{std::move(events), std::move(digest)};
}

LoadResult parse_stream(std::string_view text, EventFormat format, ParseMode mode) {
    std::vector<InteractionEvent> events;
    std::vector<ParseIssue> issues;

    std::size_t line_no = 0;
    bool first_content_line = true;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = (nl == std::string_view::npos)
                                    ? text.substr(pos)
                                    : text.substr(pos, nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;

        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (trim(line).empty()) continue;

        if (first_content_line && format == EventFormat::csv && looks_like_csv_header(line)) {
            first_content_line = false;
            continue;
        }
        first_content_line = false;

        try {
            events.push_back(parse_event_line(line, format));
        } catch (const Error& err) {
            issues.push_back(ParseIssue{line_no, err.what()});
        }
    }

    if (mode == ParseMode::strict && !issues.empty()) {
        std::ostringstream what;
        what << issues.size() << " parse error(s); first at line " << issues.front().line
             << ": " << issues.front().message;
        throw ParseErrors(what.str(), std::move(issues));
    }

    LoadResult result;
    result.stream = make_stream(std::move(events), digest_hex(text));
    result.skipped = std::move(issues);
    return result;
}

LoadResult load_stream(const std::filesystem::path& path, EventFormat format, ParseMode mode) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        throw IoError("read failure on '" + path.string() + "'");
    return parse_stream(buf.str(), format, mode);
}

std::string serialize_stream_csv(const EventStream& stream) {
    std::string out;
    for (const auto& e : stream.events) {
        out += serialize_event_csv(e);
        out += '\n';
    }
    return out;
}

} // namespace egorank
