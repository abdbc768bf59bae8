/// Built-in vocabulary: common English words, some capitalized, some with
/// trailing punctuation, and a few numerals.
pub const BUILTIN_WORDS: &[&str] = &[
    "the", "of", "and", "to", "in", "is", "that", "for", "it", "as", "was", "with", "be", "by",
    "on", "not", "he", "this", "are", "or", "his", "from", "at", "which", "but", "have", "an",
    "had", "they", "you", "were", "their", "one", "all", "we", "can", "her", "has", "there",
    "been", "if", "more", "when", "will", "would", "who", "so", "no", "she", "other", "its",
    "may", "these", "what", "them", "than", "some", "him", "time", "into", "only", "do", "could",
    "new", "about", "two", "first", "then", "also", "any", "like", "my", "should", "over",
    "such", "our", "man", "me", "even", "most", "made", "after", "many", "must", "before",
    "through", "years", "where", "much", "your", "way", "well", "down", "between", "state",
    "world", "being", "under", "never", "because", "same", "another", "while", "last",
    "might", "great", "since", "against", "right", "three", "came", "himself", "each",
    "during", "without", "place", "around", "however", "home", "small", "found", "thought",
    "went", "say", "part", "once", "general", "high", "upon", "school", "every", "during,",
    "does", "got", "united", "left", "number", "course", "war", "until", "always", "away",
    "something", "fact", "though", "water", "less", "public", "put", "think", "almost",
    "hand", "enough", "far", "took", "head", "yet", "government", "system", "better", "set",
    "told", "nothing", "night", "end", "why", "called", "didn't", "eyes", "find", "going",
    "look", "asked", "later", "knew", "point", "next", "program", "city", "business", "give",
    "group", "toward", "young", "days", "let", "room", "president", "side", "social", "given",
    "present", "several", "order", "national", "possible", "rather", "second", "face", "per",
    "among", "form", "important", "often", "things", "looked", "early", "white", "case",
    "become", "large", "need", "big", "four", "within", "felt", "along", "children", "saw",
    "best", "church", "ever", "least", "power", "development", "light", "thing", "seemed",
    "family", "interest", "want", "members", "mind", "country", "area", "others", "done",
    "turned", "although", "open", "problem", "includes,", "votes", "document", "capture",
    "camera", "image", "words", "letters", "dataset", "page", "printed", "reading", "text.",
    "The", "In", "It", "This", "A", "We", "However,", "For", "When", "These", "They", "Table",
    "Figure", "Section", "1998", "2013", "42", "7", "12.5", "(see", "above)", "method;",
    "results:", "e.g.", "i.e.", "quick", "brown", "fox", "jumps", "lazy", "dog", "zebra",
    "jigsaw", "quartz", "waltz", "nymph", "vex", "glyph", "fjord", "pixel", "kerning",
];
