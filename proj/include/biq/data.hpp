#pragma once

#include <filesystem>
#include <optional>
#include <string_view>

namespace biq {

enum class BundleKind { kCorpus, kPublishedScores, kSentimentLexicon, kBiasLexicon, kFixtures, kPool };

/// $BIQ_DATA_DIR when set, otherwise the directory baked in at build time.
std::filesystem::path DataDir();

/// Path of a bundled resource, or nullopt when `id` names nothing of that kind.
std::optional<std::filesystem::path> BundledPath(BundleKind kind, std::string_view id);

/// An existing file wins; otherwise the bundled id. Throws kIo when neither.
std::filesystem::path ResolveInput(BundleKind kind, std::string_view path_or_id);

}  // namespace biq
