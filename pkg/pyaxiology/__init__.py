__version__ = "0.1.0"

from .common import ValueDimension, ValueGroup, Vote, ModelMode, CODES
from .vector import ValueVector
from .calc import normalize, dot, quantize_vote
from .samples import Scenario, Annotation, AnnotatedSample, DatasetSplit
from .errors import (
    PyaxiologyError,
    RejectedInputError,
    DataFormatError,
    ModeMismatchError,
    FormatVersionError,
    DivergenceError,
    TermOverflowError,
    TransportError,
    ResponseDecodeError,
    ValueFunctionError,
)
from .curation.stemmer import stem
from .curation.lexicon import Lexicon, LexiconEntry, Tier, match_scenario
from .curation.embedding import EmbeddingTable, expand_lexicon_embedding
from .curation.associations import AssociationClient, AssociationConfig, fetch_associations
from .curation.annotation import aggregate_annotations, fleiss_kappa, make_augmented, agreement_report
from .curation.dataset import split_dataset, make_balanced
from .model.tokenizer import TokenizerConfig, tokenize
from .model.value_model import ValueModel, featurize, predict_utility, predict_vector
from .model.train import TrainConfig, train
from .model.evaluate import EvalReport, evaluate
from .model.fusion import FusionHead, fuse_emotion_features
from .model.prepend import prepend_label, prepend_labels
from .reward.matching import MatchResult, match_values
from .reward.dialogue import PersonaProfile, DialogueTrace, RankedCandidate, reward, rerank_candidates
from .reward.profile import Aggregation, SpeakerProfile, profile_speaker
