//! Canonical word-feature cases: each string with the 1-based rule it must
//! trigger (`None` when no rule applies). Rules, first match wins:
//! 1 `@x`, 2 `#x`, 3 rt, 4 URL, 5 digits, 6 contains `$`, 7 `:`, 8 ellipsis,
//! 9 single punctuation, 10 longer punctuation.

pub const WORD_CASES: &[(&str, Option<usize>)] = &[
    // 1: at-mentions, including every later rule shadowed by the `@` prefix
    ("@bob", Some(1)),
    ("@a", Some(1)),
    ("@@", Some(1)),
    ("@@@", Some(1)),
    ("@#tag", Some(1)),
    ("@rt", Some(1)),
    ("@RT", Some(1)),
    ("@http://x.com", Some(1)),
    ("@www.x", Some(1)),
    ("@123", Some(1)),
    ("@1", Some(1)),
    ("@$", Some(1)),
    ("@:", Some(1)),
    ("@...", Some(1)),
    ("@!", Some(1)),
    ("@_", Some(1)),
    ("@-", Some(1)),
    ("@Bob_99", Some(1)),
    ("@é", Some(1)),
    ("@user123", Some(1)),
    // 2: hashtags
    ("#tbt", Some(2)),
    ("#TBT", Some(2)),
    ("#a", Some(2)),
    ("##", Some(2)),
    ("###", Some(2)),
    ("#@x", Some(2)),
    ("#rt", Some(2)),
    ("#http://x", Some(2)),
    ("#www.x", Some(2)),
    ("#123", Some(2)),
    ("#1", Some(2)),
    ("#$", Some(2)),
    ("#:", Some(2)),
    ("#...", Some(2)),
    ("#!", Some(2)),
    ("#-", Some(2)),
    ("#tag_with_underscores", Some(2)),
    ("#ÉTÉ", Some(2)),
    // 3: retweet marker in any case
    ("rt", Some(3)),
    ("RT", Some(3)),
    ("Rt", Some(3)),
    ("rT", Some(3)),
    ("rt:", None),
    ("rts", None),
    ("rtrt", None),
    ("Rt!", None),
    ("r", None),
    ("trt", None),
    // 4: URLs
    ("http://t.co/abc", Some(4)),
    ("https://t.co", Some(4)),
    ("HTTP://T.CO", Some(4)),
    ("HtTpS://x", Some(4)),
    ("www.google.com", Some(4)),
    ("WWW.GOOGLE.COM", Some(4)),
    ("Www.x", Some(4)),
    ("Www.Example.org", Some(4)),
    ("https://", Some(4)),
    ("http://", Some(4)),
    ("www.", Some(4)),
    ("http://123", Some(4)),
    ("http://$", Some(4)),
    ("http://...", Some(4)),
    ("https://x.com/a?b=c&d=$", Some(4)),
    ("www.123", Some(4)),
    ("www.$$$", Some(4)),
    ("http:/x", None),
    ("ftp://x", None),
    ("wwwx", None),
    ("htp://x", None),
    ("http//x", None),
    ("xhttp://x", None),
    ("ww.x", None),
    ("http://a b", None),
    // 5: ASCII digits only
    ("0", Some(5)),
    ("1", Some(5)),
    ("123", Some(5)),
    ("007", Some(5)),
    ("2016", Some(5)),
    ("99999999999999999999", Some(5)),
    ("1234567890", Some(5)),
    ("12.5", None),
    ("1,000", None),
    ("-1", None),
    ("+1", None),
    ("1st", None),
    ("½", None),
    ("١٢٣", None),
    ("²", None),
    ("12:30", None),
    // 6: contains a dollar sign
    ("$", Some(6)),
    ("$$", Some(6)),
    ("$$$$", Some(6)),
    ("$5", Some(6)),
    ("5$", Some(6)),
    ("3$", Some(6)),
    ("1$2", Some(6)),
    ("US$", Some(6)),
    ("$100.00", Some(6)),
    ("a$b", Some(6)),
    ("$:", Some(6)),
    (":$", Some(6)),
    ("$...", Some(6)),
    ("$!", Some(6)),
    ("$)", Some(6)),
    ("$@", Some(6)),
    ("rt$", Some(6)),
    ("$rt", Some(6)),
    // 7: colon
    (":", Some(7)),
    ("::", Some(10)),
    (":)", Some(10)),
    (":D", None),
    // 8: ellipsis
    ("...", Some(8)),
    ("…", Some(8)),
    ("....", Some(10)),
    ("..", Some(10)),
    ("…!", None),
    ("……", None),
    (". . .", None),
    // 9: each single ASCII punctuation character
    ("!", Some(9)),
    ("\"", Some(9)),
    ("#", Some(9)),
    ("%", Some(9)),
    ("&", Some(9)),
    ("'", Some(9)),
    ("(", Some(9)),
    (")", Some(9)),
    ("*", Some(9)),
    ("+", Some(9)),
    (",", Some(9)),
    ("-", Some(9)),
    (".", Some(9)),
    ("/", Some(9)),
    (";", Some(9)),
    ("<", Some(9)),
    ("=", Some(9)),
    (">", Some(9)),
    ("?", Some(9)),
    ("@", Some(9)),
    ("[", Some(9)),
    ("\\", Some(9)),
    ("]", Some(9)),
    ("^", Some(9)),
    ("_", Some(9)),
    ("`", Some(9)),
    ("{", Some(9)),
    ("|", Some(9)),
    ("}", Some(9)),
    ("~", Some(9)),
    ("¿", None),
    ("“", None),
    ("—", None),
    ("«", None),
    // 10: punctuation runs
    ("!!", Some(10)),
    ("?!", Some(10)),
    ("!?!", Some(10)),
    (";)", Some(10)),
    (":-)", Some(10)),
    ("--", Some(10)),
    ("---", Some(10)),
    ("()", Some(10)),
    ("[]", Some(10)),
    ("**", Some(10)),
    ("!!!!!", Some(10)),
    ("''", Some(10)),
    ("\"\"", Some(10)),
    ("&&", Some(10)),
    ("...?", Some(10)),
    ("?...", Some(10)),
    ("//", Some(10)),
    ("~~", Some(10)),
    ("^_^", Some(10)),
    ("-_-", Some(10)),
    (":/", Some(10)),
    ("=)", Some(10)),
    ("..!", Some(10)),
    (".,", Some(10)),
    ("<3", None),
    // no rule
    ("a", None),
    ("A", None),
    ("I", None),
    ("word", None),
    ("Hello", None),
    ("don't", None),
    ("e-mail", None),
    ("can't", None),
    ("ok!", None),
    ("hi?", None),
    ("lol", None),
    ("😀", None),
    ("日本", None),
    ("naïve", None),
    ("x1", None),
    ("1x", None),
    ("a.b", None),
    ("U.S.", None),
    ("rtweet", None),
    ("wwwhat", None),
    ("httpx", None),
    ("b@", None),
    ("a#", None),
];
