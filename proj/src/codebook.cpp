#include <nlohmann/json.hpp>

#include "hstcs/pilot_design.hpp"

namespace hstcs {

using nlohmann::json;

std::string codebook_to_json(const Codebook& codebook) {
    json doc;
    doc["version"] = 1;
    doc["K"] = codebook.subcarriers;
    doc["P"] = codebook.entries.empty() ? 0 : codebook.entries.front().pilot_count();
    doc["T"] = static_cast<int>(codebook.power_levels.size());
    doc["M"] = codebook.doppler_half;
    doc["f_dmax_hz"] = codebook.f_dmax;
    doc["T_d_s"] = codebook.t_d;

    json entries = json::array();
    for (size_t i = 0; i < codebook.entries.size(); ++i) {
        const PilotPattern& pattern = codebook.entries[i];
        const int slot = static_cast<int>(i) + 1;
        const int x = slot - codebook.doppler_half - 1;
        json entry;
        entry["slot"] = slot;
        entry["x"] = x;
        const auto range = doppler_range_of_index(x, codebook.t_d, codebook.f_dmax);
        entry["f_d_range_hz"] = {range.first, range.second};
        entry["placement"] = pattern.placement;
        entry["power_level_index"] = pattern.level_assignment;
        entry["power_levels"] = pattern.power_levels;
        json symbols = json::array();
        for (Eigen::Index p = 0; p < pattern.symbols.size(); ++p)
            symbols.push_back({{"re", pattern.symbols(p).real()},
                               {"im", pattern.symbols(p).imag()}});
        entry["symbols"] = std::move(symbols);
        entries.push_back(std::move(entry));
    }
    doc["entries"] = std::move(entries);
    doc["provenance"] = {{"seed", codebook.provenance.seed},
                         {"iters", codebook.provenance.iterations},
                         {"delta", codebook.provenance.delta},
                         {"config_hash", codebook.provenance.config_hash}};
    return doc.dump(2) + "\n";
}

Codebook codebook_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ValidationError(std::string("codebook: ") + err.what());
    }
    try {
        Codebook book;
        book.subcarriers = doc.at("K").get<int>();
        book.doppler_half = doc.at("M").get<int>();
        book.f_dmax = doc.at("f_dmax_hz").get<double>();
        book.t_d = doc.at("T_d_s").get<double>();
        const auto& prov = doc.at("provenance");
        book.provenance.seed = prov.at("seed").get<std::uint64_t>();
        book.provenance.iterations = prov.at("iters").get<int>();
        book.provenance.delta = prov.at("delta").get<double>();
        book.provenance.config_hash = prov.at("config_hash").get<std::string>();

        const auto& entries = doc.at("entries");
        const int expected = 2 * book.doppler_half + 1;
        if (static_cast<int>(entries.size()) != expected)
            throw ValidationError("codebook: expected 2M+1 entries");
        book.entries.resize(expected);
        for (const auto& entry : entries) {
            const int slot = entry.at("slot").get<int>();
            if (slot < 1 || slot > expected)
                throw ValidationError("codebook: slot out of range");
            PilotPattern pattern;
            pattern.placement = entry.at("placement").get<std::vector<int>>();
            pattern.level_assignment =
                entry.at("power_level_index").get<std::vector<int>>();
            pattern.power_levels = entry.at("power_levels").get<std::vector<double>>();
            const auto& symbols = entry.at("symbols");
            pattern.symbols.resize(symbols.size());
            Eigen::Index p = 0;
            for (const auto& s : symbols)
                pattern.symbols(p++) = cdouble(s.at("re").get<double>(),
                                               s.at("im").get<double>());
            pattern.validate(book.subcarriers);
            book.entries[slot - 1] = std::move(pattern);
        }
        if (!book.entries.empty()) {
            book.power_levels = book.entries.front().power_levels;
            const int pilots = book.entries.front().pilot_count();
            for (const auto& e : book.entries)
                if (e.pilot_count() != pilots)
                    throw ValidationError("codebook: entries disagree on P");
        }
        return book;
    } catch (const json::exception& err) {
        throw ValidationError(std::string("codebook: ") + err.what());
    }
}

}  // namespace hstcs
