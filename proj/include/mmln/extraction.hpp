#ifndef MMLN_EXTRACTION_HPP
#define MMLN_EXTRACTION_HPP

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mmln/grounding.hpp"

namespace mmln {

// Semi-structured EMR record: named free-text sections plus flagged lab items.
struct EmrRecord {
    enum class LabFlag { High, Low, Normal };

    std::string patient_id;
    std::map<std::string, std::string> fields;  // section name -> text
    std::map<std::string, LabFlag> lab_items;

    bool operator==(const EmrRecord&) const = default;
};

// The fixed section vocabulary accepted in EMR records.
std::span<const std::string> emr_section_names();

struct LexiconEntry {
    std::string predicate;
    std::vector<std::string> sections;  // empty = all sections
    bool label = false;  // routes to the label channel instead of evidence
};

struct Lexicon {
    std::map<std::string, LexiconEntry> entries;  // surface phrase -> target
    std::vector<std::string> negation_pre;        // e.g. "no", "denies"
    std::vector<std::string> negation_post;       // e.g. "ruled out"
    int scope_window = 6;                         // tokens
    std::map<std::string, std::string> lab_items;  // item name (lowercase) -> base predicate
};

Lexicon lexicon_from_json_text(std::string_view text);
Lexicon load_lexicon(const std::filesystem::path& path);

// Per-pathology image probabilities for one patient.
struct PathologyScores {
    std::string patient_id;
    std::map<std::string, double> scores;  // pathology -> [0,1]
};

// Lowercased word tokens; '.', ';' and ',' become standalone tokens (they cut
// negation scopes), all other non-alphanumerics separate tokens.
std::vector<std::string> tokenize(std::string_view text);

// flags[i] != 0 iff token i lies in some negation scope: within scope_window
// tokens after a pre-trigger or before a post-trigger, cut at punctuation.
std::vector<uint8_t> detect_negation(std::span<const std::string> tokens, const Lexicon& lex);

// Non-negated lexicon phrase mentions in their designated sections, plus
// direct lab-flag mappings (item X flagged High => <base>_high). Atoms from
// label-flagged entries are included; build_evidence_db routes them out of
// the evidence channel.
std::set<GroundAtom> extract_text_evidence(const EmrRecord& rec, const Lexicon& lex,
                                           std::vector<std::string>* warnings = nullptr);

// CXR_<pathology>(patient) for every score strictly above the threshold.
std::set<GroundAtom> extract_image_evidence(const PathologyScores& scores, double threshold);

struct BuildResult {
    EvidenceDB db;
    std::set<GroundAtom> labels;  // atoms from label-flagged lexicon entries
    std::vector<std::string> warnings;
};

// Union of both channels, provenance-tagged. Multiple score rows for one
// patient are max-pooled per pathology before thresholding. Identical
// duplicate records are idempotent; conflicting ones are an error.
BuildResult build_evidence_db(std::span<const EmrRecord> records,
                              std::span<const PathologyScores> scores, const Lexicon& lex,
                              double threshold);

EmrRecord emr_record_from_json_text(std::string_view text);
// Directory of *.json record files (sorted by filename), or a .jsonl file.
std::vector<EmrRecord> load_emr_records(const std::filesystem::path& path);

// CSV `patient_id,pathology,score` (header line optional); rows grouped per
// patient in first-appearance order, duplicate (patient, pathology) rows
// max-pooled.
std::vector<PathologyScores> load_pathology_scores(const std::filesystem::path& path);
std::vector<PathologyScores> parse_pathology_scores(std::string_view text);

}  // namespace mmln

#endif
