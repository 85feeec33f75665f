#include "ecoagent/observer.hpp"

#include <algorithm>
#include <cctype>

#include "ecoagent/prompts.hpp"
#include "ecoagent/protocol.hpp"
#include "ecoagent/util.hpp"

namespace ecoagent::observer {

CompletionRequest build_preunderstand_prompt(const Screen& screen) {
  CompletionRequest request;
  request.system = std::string(prompts::preunderstand_system());
  request.user_segments.push_back(ImageSegment{screen.payload, screen.payload_bytes});
  request.user_segments.push_back(TextSegment{std::string(prompts::preunderstand_user())});
  return request;
}

CompletionRequest build_verify_prompt(const Screen& screen,
                                      const std::string& expectation) {
  CompletionRequest request;
  request.system = std::string(prompts::observer_system());
  request.user_segments.push_back(ImageSegment{screen.payload, screen.payload_bytes});
  request.user_segments.push_back(TextSegment{prompts::render_template(
      prompts::observer_user_template(), {{"expectation", expectation}})});
  return request;
}

namespace {

bool is_sentence_end(char c) { return c == '.' || c == '!' || c == '?'; }

/// Longest prefix ending at a sentence boundary whose proxy-token count fits
/// the cap; empty when even the first sentence overflows.
std::string cut_at_sentence_boundary(const std::string& text, int token_cap) {
  const size_t byte_cap = static_cast<size_t>(token_cap) * 4;
  size_t best = 0;
  for (size_t i = 0; i < text.size() && i < byte_cap; ++i) {
    if (!is_sentence_end(text[i])) continue;
    bool at_boundary = i + 1 == text.size() ||
                       std::isspace(static_cast<unsigned char>(text[i + 1]));
    if (at_boundary && i + 1 <= byte_cap) best = i + 1;
  }
  return text.substr(0, best);
}

/// Hard byte cut that never splits a UTF-8 sequence.
std::string cut_at_byte_cap(const std::string& text, size_t byte_cap) {
  size_t end = std::min(text.size(), byte_cap);
  while (end > 0 && (static_cast<unsigned char>(text[end]) & 0xC0) == 0x80) --end;
  return text.substr(0, end);
}

}  // namespace

Result<SummaryOutcome> pre_understand(const Screen& screen, Provider& device,
                                      int token_cap) {
  auto completion = device.complete(build_preunderstand_prompt(screen));
  if (!completion.ok()) {
    return make_error(Errc::SummarizationFailed, completion.error().to_string());
  }
  std::string text(trim(completion.value().text));
  if (text.empty()) {
    return make_error(Errc::SummarizationFailed, "provider returned empty summary");
  }

  SummaryOutcome out;
  if (count_tokens(text) > token_cap) {
    std::string cut = cut_at_sentence_boundary(text, token_cap);
    if (cut.empty()) cut = cut_at_byte_cap(text, static_cast<size_t>(token_cap) * 4);
    text = std::string(trim(cut));
    out.truncated = true;
    if (text.empty()) {
      return make_error(Errc::SummarizationFailed, "summary vanished under token cap");
    }
  }
  out.summary.text = text;
  out.summary.token_count = static_cast<int>(count_tokens(text));
  return out;
}

Result<VerificationResult> verify(const Screen& screen,
                                  const std::string& expectation,
                                  Provider& device) {
  auto completion = device.complete(build_verify_prompt(screen, expectation));
  if (!completion.ok()) {
    return make_error(Errc::VerificationFailed, completion.error().to_string());
  }
  auto verdict = protocol::parse_verdict(completion.value().text);
  if (!verdict.ok()) {
    return make_error(Errc::VerificationFailed, verdict.error().to_string());
  }
  return verdict;
}

}  // namespace ecoagent::observer
