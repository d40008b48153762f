"""Prompt templates sent to the descriptor, answer, and judge backends.

Wording here is load-bearing: backend output quality and the judge's
response format both depend on it, so edit with care.
"""

# Instruction used to obtain the visual summary of a clip.
SUMMARY_PROMPT = (
    "Generate a description of this video. Pay close attention to the objects, "
    "actions, emotions portrayed in the video, providing a vivid description of "
    "key moments. Specify any visual cues or elements that stand out."
)

# Instruction used to extract question-grounded information from a clip.
# The backend is told to emit the don't-know marker so unrelated clips can
# be flagged instead of hallucinating an answer.
RELATED_INFO_TEMPLATE = (
    "From this video extract the related information to This multichioce "
    "question and provide an explaination for your answer and If you don't "
    "know the answer, say 'I DON'T KNOW' as option 5 because maybe the "
    "questoin is not related to the video content. the question is: "
    "{question} your answer:"
)

DONT_KNOW_MARKER = "I DON'T KNOW"

# System prompt for the final answer backend. The answer backend only ever
# sees retrieved text, never video.
ANSWER_SYSTEM_PROMPT = (
    "You are given summaries and subtitles of the most relevant video clips. "
    "Answer the question using only this information; if it is insufficient, "
    "say so."
)

MCQ_INSTRUCTION = (
    "Choose the single best option. Reply with the option number or the "
    "option text."
)

# Judge prompts for scoring a predicted answer against ground truth.
JUDGE_SYSTEM_PROMPT = (
    "You are an intelligent chatbot designed for evaluating the correctness "
    "of generative outputs for question-answer pairs. "
    "Your task is to compare the predicted answer with the correct answer and "
    "determine if they match meaningfully. Here's how you can accomplish the "
    "task:\n"
    "INSTRUCTIONS:\n"
    "- Focus on the meaningful match between the predicted answer and the "
    "correct answer.\n"
    "- Consider synonyms or paraphrases as valid matches.\n"
    "- Evaluate the correctness of the prediction compared to the answer."
)

JUDGE_USER_TEMPLATE = (
    "Please evaluate the following video-based question-answer pair:\n"
    "Question: {question}\n"
    "Correct Answer: {answer}\n"
    "Predicted Answer: {pred}\n"
    "Provide your evaluation only as a yes/no and score where the score is an "
    "integer value between 0 and 5, with 5 indicating the highest meaningful "
    "match. Please generate the response in the form of a Python dictionary "
    "string with keys 'pred' and 'score', where the value of 'pred' is a "
    "string of 'yes' or 'no' and the value of 'score' is an INTEGER, not "
    "STRING. DO NOT PROVIDE ANY OTHER OUTPUT TEXT OR EXPLANATION. Only provide "
    "the Python dictionary string. For example, your response should look like "
    "this: {{'pred': 'yes', 'score': 4.8}}."
)
