#pragma once

#include "panelkt/panel.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace panelkt {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);

/// Parses a full field as a double; returns false on junk or an empty field.
bool parse_double(std::string_view text, double& out);

/// Splits one CSV record (double-quote quoting) into fields. Malformed
/// quoting raises ParseError tagged with `line_no`.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no = 0);

/// Panel with optional row labels (entity ids) carried alongside.
struct LabelledPanel {
    SamplePanel panel;
    std::vector<std::string> labels;  ///< empty when the file had no label column
};

/// Panel CSV: header row holds the grid time stamps, then one realisation per
/// row. A non-numeric first header cell marks a leading label column.
void write_panel_csv(std::ostream& out, const SamplePanel& panel, const std::vector<std::string>& labels = {},
                     const std::string& label_header = "entity");
void write_panel_csv(const std::filesystem::path& path, const SamplePanel& panel,
                     const std::vector<std::string>& labels = {}, const std::string& label_header = "entity");

LabelledPanel read_panel_csv(std::istream& in);
LabelledPanel read_panel_csv(const std::filesystem::path& path);

}  // namespace panelkt
