"""dialogforge: a self-contained university-enquiry chatbot engine.

Intent classification with supervised embeddings, CRF entity
extraction, a memoization + recurrent policy ensemble over an
event-sourced tracker, templated and data-backed actions, evaluation
reports, and a Messenger-compatible HTTP gateway.
"""

from .corpus import (
    ACTION_LISTEN,
    BotStep,
    CorpusError,
    Domain,
    EntityAnnotation,
    Slot,
    Story,
    UserStep,
    UtteranceExample,
    load_bundle,
)
from .dialogue import (
    ActionExecuted,
    BotUttered,
    DialogueTracker,
    Engine,
    PolicyConfig,
    Restarted,
    SlotSet,
    UserUttered,
    handle_message,
)
from .entity import CrfConfig, EntitySpan, extract_entities, train_crf
from .evalkit import (
    EvalReport,
    confusion_matrix,
    evaluate_entities,
    evaluate_nlu,
    evaluate_policy,
    precision_recall_f1,
)
from .gateway import Credentials, create_app, load_credentials
from .intent import IntentConfig, IntentPrediction, predict_intent, train_intent
from .pipeline import (
    DEFAULT_SEED,
    TrainedModels,
    build_engine,
    bundled_data_dir,
    load_models,
    save_models,
    train_pipeline,
)

__version__ = "0.1.0"

__all__ = [
    "ACTION_LISTEN",
    "ActionExecuted",
    "BotStep",
    "BotUttered",
    "CorpusError",
    "Credentials",
    "CrfConfig",
    "DEFAULT_SEED",
    "DialogueTracker",
    "Domain",
    "Engine",
    "EntityAnnotation",
    "EntitySpan",
    "EvalReport",
    "IntentConfig",
    "IntentPrediction",
    "PolicyConfig",
    "Restarted",
    "Slot",
    "SlotSet",
    "Story",
    "TrainedModels",
    "UserStep",
    "UserUttered",
    "UtteranceExample",
    "build_engine",
    "bundled_data_dir",
    "confusion_matrix",
    "create_app",
    "evaluate_entities",
    "evaluate_nlu",
    "evaluate_policy",
    "extract_entities",
    "handle_message",
    "load_bundle",
    "load_credentials",
    "load_models",
    "precision_recall_f1",
    "predict_intent",
    "save_models",
    "train_crf",
    "train_intent",
    "train_pipeline",
]
