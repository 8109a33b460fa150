//! The canonical, column-stable feature order.

use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureGroup {
    Structural,
    User,
    Content,
    Temporal,
}

impl FeatureGroup {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureGroup::Structural => "structural",
            FeatureGroup::User => "user",
            FeatureGroup::Content => "content",
            FeatureGroup::Temporal => "temporal",
        }
    }
}

/// Bumped whenever ids, order, or definitions change.
pub const REGISTRY_VERSION: u32 = 1;

pub const FEATURE_COUNT: usize = 45;

macro_rules! registry {
    ($($variant:ident => $name:literal, $group:ident;)*) => {
        /// One column of the feature matrix. The discriminant is the column index.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        #[repr(usize)]
        pub enum Feature {
            $($variant,)*
        }

        impl Feature {
            pub const ALL: [Feature; FEATURE_COUNT] = [$(Feature::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(Feature::$variant => $name,)*
                }
            }

            pub fn group(self) -> FeatureGroup {
                match self {
                    $(Feature::$variant => FeatureGroup::$group,)*
                }
            }
        }
    };
}

registry! {
    TweetCount => "tweet_count", Structural;
    AvgTweetLength => "avg_tweet_length", Structural;
    LifetimeMinutes => "lifetime_minutes", Structural;
    TreeDepth => "tree_depth", Structural;
    FreqHashtag => "freq_hashtag", Structural;
    RatioHashtag => "ratio_hashtag", Structural;
    FreqMedia => "freq_media", Structural;
    RatioMedia => "ratio_media", Structural;
    FreqMention => "freq_mention", Structural;
    RatioMention => "ratio_mention", Structural;
    FreqRetweet => "freq_retweet", Structural;
    RatioRetweet => "ratio_retweet", Structural;
    FreqLink => "freq_link", Structural;
    RatioLink => "ratio_link", Structural;
    MeanAccountAgeDays => "mean_account_age_days", User;
    MeanFollowers => "mean_followers", User;
    MeanFriends => "mean_friends", User;
    MeanStatuses => "mean_statuses", User;
    CountVerifiedTweets => "count_verified_tweets", User;
    RootIsVerified => "root_is_verified", User;
    MeanCreationToTweetDays => "mean_creation_to_tweet_days", User;
    NetworkDensity => "network_density", User;
    MeanPolarity => "mean_polarity", Content;
    MeanSubjectivity => "mean_subjectivity", Content;
    RatioDisagreement => "ratio_disagreement", Content;
    FreqQuestionMark => "freq_question_mark", Content;
    RatioQuestionMark => "ratio_question_mark", Content;
    FreqExclamation => "freq_exclamation", Content;
    RatioExclamation => "ratio_exclamation", Content;
    FreqMultiPunct => "freq_multi_punct", Content;
    RatioMultiPunct => "ratio_multi_punct", Content;
    FreqFirstPronoun => "freq_first_pronoun", Content;
    RatioFirstPronoun => "ratio_first_pronoun", Content;
    FreqSecondPronoun => "freq_second_pronoun", Content;
    RatioSecondPronoun => "ratio_second_pronoun", Content;
    FreqThirdPronoun => "freq_third_pronoun", Content;
    RatioThirdPronoun => "ratio_third_pronoun", Content;
    FreqSmileEmoticon => "freq_smile_emoticon", Content;
    RatioSmileEmoticon => "ratio_smile_emoticon", Content;
    SlopeAccountAge => "slope_account_age", Temporal;
    SlopeCreationGap => "slope_creation_gap", Temporal;
    SlopeFollowers => "slope_followers", Temporal;
    SlopeFriends => "slope_friends", Temporal;
    SlopeStatuses => "slope_statuses", Temporal;
    SlopeTweetsPerMinute => "slope_tweets_per_minute", Temporal;
}

impl Feature {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_name(name: &str) -> Option<Feature> {
        Feature::ALL.iter().copied().find(|f| f.name() == name)
    }

    /// For `ratio_*` columns, the `freq_*` column they are normalized from.
    pub fn frequency_of_ratio(self) -> Option<Feature> {
        let name = self.name().strip_prefix("ratio_")?;
        Feature::ALL
            .iter()
            .copied()
            .find(|f| f.name().strip_prefix("freq_") == Some(name))
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Registry column names in canonical order.
pub fn feature_names() -> impl Iterator<Item = &'static str> {
    Feature::ALL.iter().map(|f| f.name())
}
