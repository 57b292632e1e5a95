#ifndef TOPORESOLVE_NORMALIZE_HPP
#define TOPORESOLVE_NORMALIZE_HPP

#include <string>
#include <string_view>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

namespace toporesolve {

namespace detail {

inline const icu::Normalizer2& nfkc() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* inst = icu::Normalizer2::getNFKCInstance(status);
    if (U_FAILURE(status) || inst == nullptr)
        throw std::runtime_error("ICU NFKC normalizer unavailable");
    return *inst;
}

}  // namespace detail

/// Canonical form used for all name matching: NFKC, case-folded,
/// trimmed, internal whitespace collapsed to a single space.
inline std::string normalize_name(std::string_view raw) {
    icu::UnicodeString u =
        icu::UnicodeString::fromUTF8(icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));

    UErrorCode status = U_ZERO_ERROR;
    icu::UnicodeString norm = detail::nfkc().normalize(u, status);
    if (U_FAILURE(status)) norm = u;
    norm.foldCase(U_FOLD_CASE_DEFAULT);

    icu::UnicodeString out;
    bool pending_space = false;
    for (int32_t i = 0; i < norm.length();) {
        UChar32 cp = norm.char32At(i);
        i += U16_LENGTH(cp);
        if (u_isUWhiteSpace(cp)) {
            pending_space = out.length() > 0;
            continue;
        }
        if (pending_space) {
            out.append(static_cast<UChar32>(' '));
            pending_space = false;
        }
        out.append(cp);
    }

    std::string result;
    out.toUTF8String(result);
    return result;
}

}  // namespace toporesolve

#endif  // TOPORESOLVE_NORMALIZE_HPP
