#include "panelkt/panel_ingest.hpp"

#include "panelkt/errors.hpp"
#include "panelkt/panel_io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>

namespace panelkt {

std::size_t IndicatorTable::missing() const noexcept {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::nullopt));
}

std::size_t RawPanel::entity_index(const std::string& id) const {
    const auto it = std::find(entities.begin(), entities.end(), id);
    if (it == entities.end()) throw InputError("unknown entity '" + id + "'");
    return static_cast<std::size_t>(it - entities.begin());
}

std::size_t RawPanel::missing() const {
    std::size_t total = 0;
    for (const auto& [name, table] : indicators) total += table.missing();
    return total;
}

RawPanel RawPanel::select_entities(const std::vector<std::string>& ids) const {
    RawPanel out;
    out.entities = ids;
    out.years = years;
    out.indicator_target = indicator_target;
    std::vector<std::size_t> rows;
    for (const auto& id : ids) {
        rows.push_back(entity_index(id));
        if (auto g = entity_group.find(id); g != entity_group.end()) out.entity_group.insert(*g);
    }
    for (const auto& [name, table] : indicators) {
        IndicatorTable sub(ids.size(), years.size());
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t y = 0; y < years.size(); ++y) sub.at(r, y) = table.at(rows[r], y);
        out.indicators.emplace(name, std::move(sub));
    }
    return out;
}

IngestSchema load_schema(const std::filesystem::path& path) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError("schema: " + e.message(), e.line());
    }
    IngestSchema s;
    const std::string layout = tree.get("columns.layout", std::string("long"));
    if (layout == "long") s.layout = CsvLayout::Long;
    else if (layout == "wide") s.layout = CsvLayout::Wide;
    else throw ConfigError("schema: unknown layout '" + layout + "'");
    s.entity_column = tree.get("columns.entity", s.entity_column);
    s.year_column = tree.get("columns.year", s.year_column);
    s.indicator_column = tree.get("columns.indicator", s.indicator_column);
    s.value_column = tree.get("columns.value", s.value_column);
    if (auto t = tree.get_child_optional("targets"))
        for (const auto& [k, v] : *t) s.targets[k] = v.data();
    if (auto g = tree.get_child_optional("groups"))
        for (const auto& [k, v] : *g) s.groups[k] = v.data();
    s.mode = tree.get("select.mode", std::string());
    s.target = tree.get("select.target", std::string());
    s.target_b = tree.get("select.target_b", std::string());
    s.group_x = tree.get("select.group_x", std::string());
    s.group_y = tree.get("select.group_y", std::string());
    if (!s.mode.empty() && s.mode != "two-sample" && s.mode != "independence")
        throw ConfigError("schema: select.mode must be two-sample or independence");
    return s;
}

namespace {

std::size_t column_of(const std::vector<std::string>& header, const std::string& name, std::size_t line) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError("missing column '" + name + "'", line);
    return static_cast<std::size_t>(it - header.begin());
}

int parse_year(const std::string& text, std::size_t line) {
    int year = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), year);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw ParseError("invalid year '" + text + "'", line);
    return year;
}

std::optional<double> parse_cell(const std::string& text, std::size_t line) {
    if (text.find_first_not_of(" \t") == std::string::npos) return std::nullopt;
    double v = 0.0;
    if (!parse_double(text, v) || !std::isfinite(v)) throw ParseError("invalid value '" + text + "'", line);
    return v;
}

struct Record {
    std::string entity;
    int year;
    std::string indicator;
    std::optional<double> value;
    std::size_t line;
};

RawPanel assemble(const std::vector<Record>& records, const IngestSchema& schema) {
    RawPanel panel;
    std::set<int> years;
    std::set<std::string> indicators;
    for (const auto& r : records) {
        if (std::find(panel.entities.begin(), panel.entities.end(), r.entity) == panel.entities.end())
            panel.entities.push_back(r.entity);
        years.insert(r.year);
        indicators.insert(r.indicator);
    }
    panel.years.assign(years.begin(), years.end());
    for (const auto& ind : indicators) panel.indicators.emplace(ind, IndicatorTable(panel.entities.size(), years.size()));

    std::set<std::tuple<std::size_t, std::size_t, std::string>> seen;
    for (const auto& r : records) {
        const std::size_t e = panel.entity_index(r.entity);
        const auto y = static_cast<std::size_t>(std::lower_bound(panel.years.begin(), panel.years.end(), r.year) -
                                                panel.years.begin());
        if (!seen.emplace(e, y, r.indicator).second)
            throw ConflictError("duplicate cell (" + r.entity + ", " + std::to_string(r.year) + ", " + r.indicator + ")",
                                r.line);
        panel.indicators.at(r.indicator).at(e, y) = r.value;
    }
    panel.indicator_target = schema.targets;
    panel.entity_group = schema.groups;
    return panel;
}

}  // namespace

RawPanel load_csv(std::istream& in, const IngestSchema& schema) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") != std::string::npos) header = split_csv_line(line, line_no);
    }
    if (header.empty()) throw ParseError("input CSV has no header", line_no);

    std::vector<Record> records;
    const std::size_t ent = column_of(header, schema.entity_column, line_no);
    const std::size_t ind = column_of(header, schema.indicator_column, line_no);
    if (schema.layout == CsvLayout::Long) {
        const std::size_t yr = column_of(header, schema.year_column, line_no);
        const std::size_t val = column_of(header, schema.value_column, line_no);
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            const auto f = split_csv_line(line, line_no);
            if (f.size() != header.size())
                throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                     std::to_string(f.size()),
                                 line_no);
            if (f[ent].empty() || f[ind].empty()) throw ParseError("empty entity or indicator", line_no);
            records.push_back({f[ent], parse_year(f[yr], line_no), f[ind], parse_cell(f[val], line_no), line_no});
        }
    } else {
        std::vector<std::pair<std::size_t, int>> year_cols;
        for (std::size_t c = 0; c < header.size(); ++c)
            if (c != ent && c != ind) year_cols.emplace_back(c, parse_year(header[c], line_no));
        if (year_cols.empty()) throw ParseError("wide layout has no year columns", line_no);
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            const auto f = split_csv_line(line, line_no);
            if (f.size() != header.size())
                throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                     std::to_string(f.size()),
                                 line_no);
            if (f[ent].empty() || f[ind].empty()) throw ParseError("empty entity or indicator", line_no);
            for (const auto& [c, year] : year_cols)
                records.push_back({f[ent], year, f[ind], parse_cell(f[c], line_no), line_no});
        }
    }
    if (records.empty()) throw ParseError("input CSV has no data rows", line_no);
    return assemble(records, schema);
}

RawPanel load_csv(const std::filesystem::path& path, const IngestSchema& schema) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    return load_csv(in, schema);
}

void write_long_csv(std::ostream& out, const RawPanel& panel) {
    out << "entity,year,indicator,value\n";
    for (const auto& [name, table] : panel.indicators)
        for (std::size_t e = 0; e < panel.entities.size(); ++e)
            for (std::size_t y = 0; y < panel.years.size(); ++y) {
                out << panel.entities[e] << ',' << panel.years[y] << ',' << name << ',';
                if (const auto& v = table.at(e, y)) out << format_double(*v);
                out << '\n';
            }
}

double inverse_distance_fill(const std::vector<Donor>& donors) {
    if (donors.empty()) throw DegenerateError("no donors to impute from");
    double exact_sum = 0.0;
    std::size_t exact = 0;
    for (const auto& d : donors)
        if (d.distance == 0.0) {
            exact_sum += d.value;
            ++exact;
        }
    if (exact > 0) return exact_sum / static_cast<double>(exact);
    double num = 0.0;
    double den = 0.0;
    for (const auto& d : donors) {
        const double w = 1.0 / d.distance;
        num += w * d.value;
        den += w;
    }
    return num / den;
}

Matrix entity_distances(const RawPanel& panel, const ImputeOptions& options) {
    const std::size_t E = panel.entities.size();
    const std::size_t Y = panel.years.size();
    // One coordinate per (indicator, year): z-scored observed values.
    std::vector<std::vector<std::optional<double>>> coords;
    for (const auto& [name, table] : panel.indicators)
        for (std::size_t y = 0; y < Y; ++y) {
            std::vector<std::optional<double>> c(E);
            double sum = 0.0;
            double sq = 0.0;
            std::size_t count = 0;
            for (std::size_t e = 0; e < E; ++e)
                if (const auto& v = table.at(e, y)) {
                    c[e] = *v;
                    sum += *v;
                    ++count;
                }
            if (options.standardise) {
                const double mean = count ? sum / static_cast<double>(count) : 0.0;
                for (const auto& v : c)
                    if (v) sq += (*v - mean) * (*v - mean);
                const double sd = count > 1 ? std::sqrt(sq / static_cast<double>(count)) : 0.0;
                for (auto& v : c)
                    if (v) *v = sd > 0.0 ? (*v - mean) / sd : 0.0;
            }
            coords.push_back(std::move(c));
        }

    Matrix dist = Matrix::Zero(static_cast<Eigen::Index>(E), static_cast<Eigen::Index>(E));
    for (std::size_t a = 0; a < E; ++a)
        for (std::size_t b = a + 1; b < E; ++b) {
            double sq = 0.0;
            std::size_t shared = 0;
            for (const auto& c : coords)
                if (c[a] && c[b]) {
                    sq += (*c[a] - *c[b]) * (*c[a] - *c[b]);
                    ++shared;
                }
            const double d = shared ? std::sqrt(sq) : std::numeric_limits<double>::infinity();
            dist(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = d;
            dist(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = d;
        }
    return dist;
}

RawPanel impute(const RawPanel& panel, const ImputeOptions& options, ImputeReport* report) {
    RawPanel out = panel;
    if (panel.missing() == 0) return out;
    const Matrix dist = entity_distances(panel, options);
    const std::size_t E = panel.entities.size();
    for (const auto& [name, table] : panel.indicators) {
        auto& target = out.indicators.at(name);
        for (std::size_t e = 0; e < E; ++e)
            for (std::size_t y = 0; y < panel.years.size(); ++y) {
                if (table.at(e, y)) continue;
                std::vector<Donor> donors;
                std::vector<Donor> unranked;
                for (std::size_t d = 0; d < E; ++d) {
                    if (d == e || !table.at(d, y)) continue;
                    const double dd = dist(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(d));
                    (std::isfinite(dd) ? donors : unranked).push_back({*table.at(d, y), dd});
                }
                if (donors.empty()) {
                    // No donor shares an observed coordinate with e: equal weights.
                    for (auto& u : unranked) u.distance = 1.0;
                    donors = std::move(unranked);
                }
                if (donors.empty())
                    throw InputError("cannot impute (" + panel.entities[e] + ", " + std::to_string(panel.years[y]) +
                                     ", " + name + "): no entity observes it");
                target.at(e, y) = inverse_distance_fill(donors);
                if (report) {
                    ++report->cells_filled;
                    report->donors_per_cell.push_back(donors.size());
                }
            }
    }
    return out;
}

RawPanel aggregate_to_targets(const RawPanel& panel) {
    std::map<std::string, std::vector<const IndicatorTable*>> members;
    for (const auto& [name, table] : panel.indicators) {
        const auto it = panel.indicator_target.find(name);
        if (it == panel.indicator_target.end()) throw ConfigError("indicator '" + name + "' is not mapped to a target");
        members[it->second].push_back(&table);
    }
    RawPanel out;
    out.entities = panel.entities;
    out.years = panel.years;
    out.entity_group = panel.entity_group;
    for (const auto& [target, tables] : members) {
        IndicatorTable agg(panel.entities.size(), panel.years.size());
        for (std::size_t e = 0; e < panel.entities.size(); ++e)
            for (std::size_t y = 0; y < panel.years.size(); ++y) {
                double sum = 0.0;
                std::size_t count = 0;
                for (const auto* t : tables)
                    if (const auto& v = t->at(e, y)) {
                        sum += *v;
                        ++count;
                    }
                if (count) agg.at(e, y) = sum / static_cast<double>(count);
            }
        out.indicators.emplace(target, std::move(agg));
        out.indicator_target[target] = target;
    }
    return out;
}

namespace {

SamplePanel rows_of(const RawPanel& panel, const std::string& indicator, const std::vector<std::size_t>& rows) {
    const auto it = panel.indicators.find(indicator);
    if (it == panel.indicators.end()) throw InputError("unknown indicator or target '" + indicator + "'");
    Matrix values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(panel.years.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t y = 0; y < panel.years.size(); ++y) {
            const auto& v = it->second.at(rows[r], y);
            if (!v)
                throw InputError("panel is incomplete at (" + panel.entities[rows[r]] + ", " +
                                 std::to_string(panel.years[y]) + ", " + indicator + "); impute first");
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(y)) = *v;
        }
    std::vector<double> grid(panel.years.begin(), panel.years.end());
    return SamplePanel(std::move(values), std::move(grid));
}

}  // namespace

SamplePanel indicator_panel(const RawPanel& panel, const std::string& indicator) {
    std::vector<std::size_t> all(panel.entities.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return rows_of(panel, indicator, all);
}

PanelSelection to_two_sample_panels(const RawPanel& panel, const std::string& target, const std::string& group_x,
                                    const std::string& group_y) {
    std::vector<std::size_t> rx;
    std::vector<std::size_t> ry;
    PanelSelection out;
    for (std::size_t e = 0; e < panel.entities.size(); ++e) {
        const auto it = panel.entity_group.find(panel.entities[e]);
        if (it == panel.entity_group.end()) continue;
        if (it->second == group_x) {
            rx.push_back(e);
            out.x_entities.push_back(panel.entities[e]);
        } else if (it->second == group_y) {
            ry.push_back(e);
            out.y_entities.push_back(panel.entities[e]);
        }
    }
    if (rx.size() < 2 || ry.size() < 2) throw SampleSizeError("each group needs at least two entities");
    out.x = rows_of(panel, target, rx);
    out.y = rows_of(panel, target, ry);
    return out;
}

PanelSelection to_independence_panels(const RawPanel& panel, const std::string& target_a,
                                      const std::string& target_b) {
    if (panel.entities.size() < 2) throw SampleSizeError("independence mode needs at least two entities");
    PanelSelection out{indicator_panel(panel, target_a), indicator_panel(panel, target_b), panel.entities,
                       panel.entities};
    return out;
}

}  // namespace panelkt
