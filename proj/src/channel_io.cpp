#include "irs/channel_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace irs {

ChannelFileError::ChannelFileError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line)
{
}

namespace {

void append_number(std::string& out, double value)
{
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    out.append(buf, res.ptr);
}

void append_row(std::string& out, std::span<const cplx> values)
{
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            out += ' ';
        append_number(out, values[i].real());
        out += ' ';
        append_number(out, values[i].imag());
    }
    out += '\n';
}

// Splits text into non-comment, non-blank lines, keeping their 1-based numbers.
struct Line
{
    std::size_t number;
    std::string_view text;
};

std::vector<Line> content_lines(std::string_view text)
{
    std::vector<Line> lines;
    std::size_t number = 0;
    while (!text.empty()) {
        ++number;
        const auto end = text.find('\n');
        std::string_view line = text.substr(0, end);
        text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos)
            continue;
        const auto last = line.find_last_not_of(" \t\r");
        lines.push_back({number, line.substr(first, last - first + 1)});
    }
    return lines;
}

std::vector<std::string_view> tokens(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
            ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t')
            ++i;
        if (i > start)
            out.push_back(line.substr(start, i - start));
    }
    return out;
}

double parse_double(std::string_view token, std::size_t line)
{
    double value = 0.0;
    const char* first = token.data();
    if (!token.empty() && token.front() == '+')
        ++first;
    auto res = std::from_chars(first, token.data() + token.size(), value);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
        throw ChannelFileError(line, "not a number: '" + std::string(token) + "'");
    if (!std::isfinite(value))
        throw ChannelFileError(line, "non-finite value: '" + std::string(token) + "'");
    return value;
}

std::size_t parse_count(std::string_view token, std::size_t line, const char* what)
{
    std::size_t value = 0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size() || value == 0)
        throw ChannelFileError(line, std::string("invalid ") + what + ": '" + std::string(token) + "'");
    return value;
}

class Reader
{
public:
    explicit Reader(std::string_view text) : lines_(content_lines(text)) {}

    const Line& next(const char* expecting)
    {
        if (pos_ >= lines_.size())
            throw ChannelFileError(last_line(), std::string("unexpected end of file, expected ") + expecting);
        return lines_[pos_++];
    }

    void expect_marker(const char* marker)
    {
        const Line& l = next(marker);
        if (l.text != marker)
            throw ChannelFileError(l.number, std::string("expected '") + marker + "', found '" + std::string(l.text) + "'");
    }

    void read_row(std::span<cplx> out, const char* what)
    {
        const Line& l = next(what);
        const auto toks = tokens(l.text);
        if (toks.size() != 2 * out.size())
            throw ChannelFileError(l.number, std::string(what) + ": expected " + std::to_string(2 * out.size()) +
                                                 " values, found " + std::to_string(toks.size()));
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = {parse_double(toks[2 * i], l.number), parse_double(toks[2 * i + 1], l.number)};
    }

    void expect_end()
    {
        if (pos_ < lines_.size())
            throw ChannelFileError(lines_[pos_].number, "trailing content after h_d");
    }

private:
    std::size_t last_line() const { return lines_.empty() ? 1 : lines_.back().number; }

    std::vector<Line> lines_;
    std::size_t pos_ = 0;
};

} // namespace

void write_channels(std::ostream& os, const ChannelSet& channels) { os << format_channels(channels); }

std::string format_channels(const ChannelSet& channels)
{
    channels.validate();
    const std::size_t m = channels.bs_antennas();
    const std::size_t n = channels.irs_elements();
    std::string out = "IRSCHANNELS " + std::to_string(kChannelFileVersion) + " " + std::to_string(m) + " " +
                      std::to_string(n) + "\nH_r\n";
    CVector row(n);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c)
            row[c] = channels.h_r(r, c);
        append_row(out, row);
    }
    out += "h_v\n";
    append_row(out, channels.h_v);
    out += "h_d\n";
    append_row(out, channels.h_d);
    return out;
}

ChannelSet parse_channels(std::string_view text)
{
    Reader reader(text);
    const Line& header = reader.next("header");
    const auto head = tokens(header.text);
    if (head.size() != 4 || head[0] != "IRSCHANNELS")
        throw ChannelFileError(header.number, "expected header 'IRSCHANNELS <version> <M> <N>'");
    const std::size_t version = parse_count(head[1], header.number, "format version");
    if (version != kChannelFileVersion)
        throw ChannelFileError(header.number, "unsupported format version " + std::to_string(version));
    const std::size_t m = parse_count(head[2], header.number, "M");
    const std::size_t n = parse_count(head[3], header.number, "N");

    ChannelSet ch;
    ch.h_r = CMatrix(m, n);
    ch.h_v.resize(n);
    ch.h_d.resize(m);

    reader.expect_marker("H_r");
    CVector row(n);
    for (std::size_t r = 0; r < m; ++r) {
        reader.read_row(row, "H_r row");
        for (std::size_t c = 0; c < n; ++c)
            ch.h_r(r, c) = row[c];
    }
    reader.expect_marker("h_v");
    reader.read_row(ch.h_v, "h_v");
    reader.expect_marker("h_d");
    reader.read_row(ch.h_d, "h_d");
    reader.expect_end();
    return ch;
}

ChannelSet load_channels(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open channel file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_channels(buf.str());
}

void save_channels(const std::filesystem::path& path, const ChannelSet& channels)
{
    write_file_atomically(path, format_channels(channels));
}

void write_file_atomically(const std::filesystem::path& path, std::string_view contents)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ignore;
            std::filesystem::remove(tmp, ignore);
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignore;
        std::filesystem::remove(tmp, ignore);
        throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

} // namespace irs
