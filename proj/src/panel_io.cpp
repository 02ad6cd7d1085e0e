#include "panelkt/panel_io.hpp"

#include "panelkt/errors.hpp"

#include <boost/tokenizer.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

namespace panelkt {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

bool parse_double(std::string_view text, double& out) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::string record = line;
    if (!record.empty() && record.back() == '\r') record.pop_back();
    bool open = false;
    for (std::size_t i = 0; i < record.size(); ++i) {
        if (record[i] == '\\') ++i;
        else if (record[i] == '"') open = !open;
    }
    if (open) throw ParseError("malformed CSV record: unterminated quoted field", line_no);
    using Sep = boost::escaped_list_separator<char>;
    try {
        boost::tokenizer<Sep> tok(record, Sep('\\', ',', '"'));
        return {tok.begin(), tok.end()};
    } catch (const boost::escaped_list_error& e) {
        throw ParseError(std::string("malformed CSV record: ") + e.what(), line_no);
    }
}

void write_panel_csv(std::ostream& out, const SamplePanel& panel, const std::vector<std::string>& labels,
                     const std::string& label_header) {
    const bool labelled = !labels.empty();
    if (labelled && labels.size() != panel.realisations())
        throw DimensionError("row label count does not match the panel");
    if (labelled) out << label_header << ',';
    for (std::size_t t = 0; t < panel.time_points(); ++t) out << (t ? "," : "") << format_double(panel.grid()[t]);
    out << '\n';
    for (std::size_t i = 0; i < panel.realisations(); ++i) {
        if (labelled) out << labels[i] << ',';
        for (std::size_t t = 0; t < panel.time_points(); ++t)
            out << (t ? "," : "")
                << format_double(panel.values()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)));
        out << '\n';
    }
}

void write_panel_csv(const std::filesystem::path& path, const SamplePanel& panel,
                     const std::vector<std::string>& labels, const std::string& label_header) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
    write_panel_csv(out, panel, labels, label_header);
    if (!out) throw InputError("failed writing '" + path.string() + "'");
}

LabelledPanel read_panel_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") != std::string::npos) header = split_csv_line(line, line_no);
    }
    if (header.empty()) throw ParseError("panel CSV has no header", line_no);

    double probe = 0.0;
    const bool labelled = !parse_double(header.front(), probe);
    const std::size_t offset = labelled ? 1 : 0;
    std::vector<double> grid;
    for (std::size_t c = offset; c < header.size(); ++c) {
        double t = 0.0;
        if (!parse_double(header[c], t)) throw ParseError("non-numeric time stamp '" + header[c] + "'", line_no);
        grid.push_back(t);
    }
    if (grid.empty()) throw ParseError("panel CSV has no time columns", line_no);

    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_csv_line(line, line_no);
        if (fields.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             line_no);
        if (labelled) labels.push_back(fields.front());
        std::vector<double> row;
        row.reserve(grid.size());
        for (std::size_t c = offset; c < fields.size(); ++c) {
            double v = 0.0;
            if (!parse_double(fields[c], v)) throw ParseError("missing or non-numeric value '" + fields[c] + "'", line_no);
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("panel CSV has no data rows", line_no);

    Matrix values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t t = 0; t < grid.size(); ++t)
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = rows[i][t];
    return {SamplePanel(std::move(values), std::move(grid)), std::move(labels)};
}

LabelledPanel read_panel_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    return read_panel_csv(in);
}

}  // namespace panelkt
